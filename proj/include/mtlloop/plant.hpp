#pragma once

#include <vector>

#include "mtlloop/metric.hpp"
#include "mtlloop/trace.hpp"

namespace mtlloop {

/// Discrete-time linear plant x(k+1) = A x(k) + B u(k) with inputs drawn
/// from a finite set.
struct LinearSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::vector<Eigen::VectorXd> inputs;  // finite input set U

  LinearSystem(Eigen::MatrixXd a_, Eigen::MatrixXd b_, std::vector<Eigen::VectorXd> inputs_);

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }

  /// Index of u in U (exact comparison), or throws.
  std::size_t input_index(const Eigen::VectorXd& u) const;

  /// One step with the pinned evaluation order (A*x) + (B*u).
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

/// Simulate K steps under a recorded input sequence (u(k) must be in U).
/// Timestamps are t0, t0+period, ...
TimedTrace simulate_open_loop(const LinearSystem& sys, const Eigen::VectorXd& x0,
                              const std::vector<Eigen::VectorXd>& u, std::size_t steps,
                              const Rat& t0, const Rat& period);

/// alpha = max_{0<=k<=K} ||A^k|| in the M-induced operator norm; bounds how
/// far an initial-state perturbation can propagate under shared inputs.
double state_propagation_bound(const LinearSystem& sys, const Metric& metric, std::size_t horizon);

}  // namespace mtlloop
