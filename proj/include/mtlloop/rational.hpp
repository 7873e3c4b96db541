#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mtlloop {

/// Exact rational time value. Timestamps and interval endpoints are parsed
/// from decimal strings, so denominators stay powers of ten (times 2^a 5^b
/// after normalization) and values round-trip through to_string().
class Rat {
public:
  Rat() : num_(0), den_(1) {}
  Rat(std::int64_t n) : num_(n), den_(1) {}
  Rat(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  static Rat parse(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  Rat operator+(const Rat& o) const { return Rat(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
  Rat operator-(const Rat& o) const { return Rat(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat operator*(const Rat& o) const { return Rat(num_ * o.num_, den_ * o.den_); }

  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const { return num_ * o.den_ < o.num_ * den_; }
  bool operator<=(const Rat& o) const { return num_ * o.den_ <= o.num_ * den_; }
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return o <= *this; }

private:
  void normalize();

  std::int64_t num_;
  std::int64_t den_;
};

inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace mtlloop
