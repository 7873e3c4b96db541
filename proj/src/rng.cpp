#include "mtlloop/rng.hpp"

namespace mtlloop {

double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  std::uint64_t i = index + 1;  // skip the zero point
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace mtlloop
