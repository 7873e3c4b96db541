#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mtlloop/rational.hpp"

namespace mtlloop {

/// Half-open time interval [lo, hi), hi possibly +inf.
struct Interval {
  Rat lo;
  std::optional<Rat> hi;  // nullopt = unbounded

  Interval() : lo(0), hi(std::nullopt) {}
  Interval(Rat lo_, std::optional<Rat> hi_) : lo(lo_), hi(hi_) {
    if (lo < Rat(0)) throw std::invalid_argument("interval with negative lower bound");
    if (hi && !(lo < *hi)) throw std::invalid_argument("malformed interval [" + lo.to_string() + "," + hi->to_string() + ")");
  }

  bool contains(const Rat& t) const { return lo <= t && (!hi || t < *hi); }
  bool bounded() const { return hi.has_value(); }

  std::string to_string() const {
    return "[" + lo.to_string() + "," + (hi ? hi->to_string() : std::string("inf")) + ")";
  }

  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

}  // namespace mtlloop
