#include "mtlloop/rational.hpp"

namespace mtlloop {

void Rat::normalize() {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rat Rat::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number literal");
  std::size_t pos = 0;
  bool neg = false;
  if (text[pos] == '-' || text[pos] == '+') {
    neg = text[pos] == '-';
    ++pos;
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool any_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("malformed decimal literal: " + text);
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal literal: " + text);
    any_digit = true;
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
  }
  if (!any_digit) throw std::invalid_argument("malformed decimal literal: " + text);
  return Rat(neg ? -num : num, den);
}

std::string Rat::to_string() const {
  // Denominators coming from decimal input are of the form 2^a 5^b; expand
  // back to a power of ten and print as a decimal.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) {  // not a decimal fraction; fall back to num/den
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  int digits = twos > fives ? twos : fives;
  std::int64_t scale = 1;
  for (int i = twos; i < digits; ++i) scale *= 2;
  for (int i = fives; i < digits; ++i) scale *= 5;
  std::int64_t n = num_ < 0 ? -num_ : num_;
  n *= scale;
  std::string body = std::to_string(n);
  if (digits > 0) {
    while (static_cast<int>(body.size()) <= digits) body.insert(body.begin(), '0');
    body.insert(body.end() - digits, '.');
  }
  return (num_ < 0 ? "-" : "") + body;
}

}  // namespace mtlloop
