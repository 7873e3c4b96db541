#include "mtlloop/parser.hpp"

#include <cctype>

#include "mtlloop/errors.hpp"

namespace mtlloop {

namespace {

class Parser {
public:
  Parser(const std::string& text, const PredicateMap& pmap) : text_(text), pmap_(pmap) {}

  FormulaPtr run() {
    FormulaPtr f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

private:
  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (peek() == '|') {
      ++pos_;
      f = Formula::disjunction(f, parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_until_since();
    while (peek() == '&') {
      ++pos_;
      f = Formula::conjunction(f, parse_until_since());
    }
    return f;
  }

  FormulaPtr parse_until_since() {
    FormulaPtr f = parse_unary();
    skip_ws();
    if (pos_ + 1 < text_.size() && (text_[pos_] == 'U' || text_[pos_] == 'S') && text_[pos_ + 1] == '[') {
      char op = text_[pos_++];
      Interval iv = parse_interval();
      FormulaPtr rhs = parse_until_since();  // right associative
      f = op == 'U' ? Formula::until(iv, f, rhs) : Formula::since(iv, f, rhs);
    }
    return f;
  }

  FormulaPtr parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of formula", pos_);
    char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return Formula::negation(parse_unary());
    }
    if ((c == 'F' || c == 'G' || c == 'P' || c == 'H') && pos_ + 1 < text_.size() && text_[pos_ + 1] == '[') {
      ++pos_;
      Interval iv = parse_interval();
      FormulaPtr child = parse_unary();
      switch (c) {
        case 'F': return Formula::eventually(iv, child);
        case 'G': return Formula::always(iv, child);
        case 'P': return Formula::once(iv, child);
        default: return Formula::historically(iv, child);
      }
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of formula", pos_);
    if (text_[pos_] == '(') {
      ++pos_;
      FormulaPtr f = parse_or();
      expect(')');
      return f;
    }
    std::size_t start = pos_;
    std::string ident = parse_ident();
    if (ident == "true") return Formula::make_true();
    if (ident == "false") return Formula::negation(Formula::make_true());
    if (!pmap_.has(ident)) throw ParseError("unknown atom name '" + ident + "'", start);
    return Formula::atom(ident);
  }

  Interval parse_interval() {
    expect('[');
    std::size_t start = pos_;
    Rat lo = parse_number("interval lower bound");
    expect(',');
    skip_ws();
    std::optional<Rat> hi;
    if (text_.compare(pos_, 3, "inf") == 0) {
      pos_ += 3;
    } else {
      hi = parse_number("interval upper bound");
    }
    expect(')');
    if (hi && !(lo < *hi)) {
      throw ParseError("malformed interval [" + lo.to_string() + "," + hi->to_string() + ")", start);
    }
    return Interval(lo, hi);
  }

  Rat parse_number(const std::string& what) {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ == start) throw ParseError("expected " + what, start);
    try {
      return Rat::parse(text_.substr(start, pos_ - start));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start);
    }
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto body = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    if (pos_ >= text_.size() || !head(text_[pos_])) throw ParseError("expected atom or constant", pos_);
    ++pos_;
    while (pos_ < text_.size() && body(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  const std::string& text_;
  const PredicateMap& pmap_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const PredicateMap& pmap) {
  return Parser(text, pmap).run();
}

}  // namespace mtlloop
