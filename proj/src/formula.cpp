#include "mtlloop/formula.hpp"

namespace mtlloop {

namespace {

// Precedence levels used by parser and printer: | < & < U/S < unary < atom.
int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Or: return 0;
    case Formula::Kind::And: return 1;
    case Formula::Kind::Until:
    case Formula::Kind::Since: return 2;
    case Formula::Kind::Not:
    case Formula::Kind::Eventually:
    case Formula::Kind::Always:
    case Formula::Kind::Once:
    case Formula::Kind::Historically: return 3;
    default: return 4;
  }
}

std::string wrap(const Formula& f, int min_prec) {
  std::string s = f.to_string();
  if (precedence(f.kind()) < min_prec) return "(" + s + ")";
  return s;
}

}  // namespace

std::string Formula::to_string() const {
  switch (kind_) {
    case Kind::True: return "true";
    case Kind::Atom: return atom_;
    case Kind::Not: return "!" + wrap(*children_[0], 3);
    case Kind::And: return wrap(*children_[0], 1) + " & " + wrap(*children_[1], 1);
    case Kind::Or: return wrap(*children_[0], 0) + " | " + wrap(*children_[1], 0);
    case Kind::Until: return wrap(*children_[0], 3) + " U" + interval_.to_string() + " " + wrap(*children_[1], 2);
    case Kind::Since: return wrap(*children_[0], 3) + " S" + interval_.to_string() + " " + wrap(*children_[1], 2);
    case Kind::Eventually: return "F" + interval_.to_string() + " " + wrap(*children_[0], 3);
    case Kind::Always: return "G" + interval_.to_string() + " " + wrap(*children_[0], 3);
    case Kind::Once: return "P" + interval_.to_string() + " " + wrap(*children_[0], 3);
    case Kind::Historically: return "H" + interval_.to_string() + " " + wrap(*children_[0], 3);
  }
  return "?";
}

FormulaPtr Formula::make_true() {
  return FormulaPtr(new Formula(Kind::True, "", Interval(), {}));
}

FormulaPtr Formula::atom(std::string name) {
  return FormulaPtr(new Formula(Kind::Atom, std::move(name), Interval(), {}));
}

FormulaPtr Formula::negation(FormulaPtr f) {
  return FormulaPtr(new Formula(Kind::Not, "", Interval(), {std::move(f)}));
}

FormulaPtr Formula::conjunction(FormulaPtr a, FormulaPtr b) {
  return FormulaPtr(new Formula(Kind::And, "", Interval(), {std::move(a), std::move(b)}));
}

FormulaPtr Formula::disjunction(FormulaPtr a, FormulaPtr b) {
  return FormulaPtr(new Formula(Kind::Or, "", Interval(), {std::move(a), std::move(b)}));
}

FormulaPtr Formula::until(Interval i, FormulaPtr a, FormulaPtr b) {
  return FormulaPtr(new Formula(Kind::Until, "", i, {std::move(a), std::move(b)}));
}

FormulaPtr Formula::since(Interval i, FormulaPtr a, FormulaPtr b) {
  return FormulaPtr(new Formula(Kind::Since, "", i, {std::move(a), std::move(b)}));
}

FormulaPtr Formula::eventually(Interval i, FormulaPtr f) {
  return FormulaPtr(new Formula(Kind::Eventually, "", i, {std::move(f)}));
}

FormulaPtr Formula::always(Interval i, FormulaPtr f) {
  return FormulaPtr(new Formula(Kind::Always, "", i, {std::move(f)}));
}

FormulaPtr Formula::once(Interval i, FormulaPtr f) {
  return FormulaPtr(new Formula(Kind::Once, "", i, {std::move(f)}));
}

FormulaPtr Formula::historically(Interval i, FormulaPtr f) {
  return FormulaPtr(new Formula(Kind::Historically, "", i, {std::move(f)}));
}

}  // namespace mtlloop
