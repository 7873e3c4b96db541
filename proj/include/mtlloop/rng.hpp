#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "mtlloop/metric.hpp"

namespace mtlloop {

/// Deterministic, platform-independent generator (splitmix64 core) so
/// seeded reports are byte-identical across runs.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 5e-324;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform in the M-metric ball of the given radius.
  Eigen::VectorXd in_metric_ball(const Metric& metric, double radius) {
    int d = metric.dim();
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = gaussian();
    double norm = z.norm();
    if (norm == 0.0) norm = 1.0;
    double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(d));
    // ||v||_M = ||L^T v||_2 with M = L L^T, so map the Euclidean ball through L^-T.
    Eigen::VectorXd w = (r / norm) * z;
    return metric.cholesky_factor().transpose().triangularView<Eigen::Upper>().solve(w);
  }

  /// Derive an independent stream, e.g. per sample index.
  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0x632be59bd9b4e019ull * (stream + 1)));
    r.next_u64();
    return r;
  }

private:
  std::uint64_t state_;
};

/// Halton low-discrepancy sequence value (index >= 0) for a prime base.
double halton(std::uint64_t index, std::uint64_t base);

}  // namespace mtlloop
