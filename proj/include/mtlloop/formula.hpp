#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mtlloop/interval.hpp"

namespace mtlloop {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// MTL abstract syntax tree node. Eventually/Always/Once/Historically are
/// kept as first-class kinds; they evaluate identically to their
/// Until/Since expansions.
class Formula {
public:
  enum class Kind {
    True,
    Atom,
    Not,
    And,
    Or,
    Until,
    Since,
    Eventually,
    Always,
    Once,
    Historically,
  };

  Kind kind() const { return kind_; }
  const std::string& atom_name() const { return atom_; }
  const Interval& interval() const { return interval_; }
  const std::vector<FormulaPtr>& children() const { return children_; }
  const FormulaPtr& child(std::size_t i) const { return children_[i]; }

  bool is_temporal() const { return kind_ >= Kind::Until; }
  bool is_future() const { return kind_ == Kind::Until || kind_ == Kind::Eventually || kind_ == Kind::Always; }
  bool is_past() const { return kind_ == Kind::Since || kind_ == Kind::Once || kind_ == Kind::Historically; }

  std::string to_string() const;

  static FormulaPtr make_true();
  static FormulaPtr atom(std::string name);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr until(Interval i, FormulaPtr a, FormulaPtr b);
  static FormulaPtr since(Interval i, FormulaPtr a, FormulaPtr b);
  static FormulaPtr eventually(Interval i, FormulaPtr f);
  static FormulaPtr always(Interval i, FormulaPtr f);
  static FormulaPtr once(Interval i, FormulaPtr f);
  static FormulaPtr historically(Interval i, FormulaPtr f);

private:
  Formula(Kind kind, std::string atom, Interval interval, std::vector<FormulaPtr> children)
      : kind_(kind), atom_(std::move(atom)), interval_(interval), children_(std::move(children)) {}

  Kind kind_;
  std::string atom_;
  Interval interval_;
  std::vector<FormulaPtr> children_;
};

}  // namespace mtlloop
