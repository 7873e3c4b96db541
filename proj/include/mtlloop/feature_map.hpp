#pragma once

#include <vector>

#include "mtlloop/metric.hpp"
#include "mtlloop/trace.hpp"

namespace mtlloop {

/// Metric-induced operator norm sup_{||v||_in = 1} ||C v||_out.
double operator_norm(const Eigen::MatrixXd& c, const Metric& in, const Metric& out);

/// Affine feature map s -> C s + d0 with a declared Lipschitz constant
/// (selection of coordinates is the special case of 0/1 rows).
struct FeatureMap {
  Eigen::MatrixXd c;
  Eigen::VectorXd d0;
  double lipschitz = 0.0;

  static FeatureMap affine(Eigen::MatrixXd c, Eigen::VectorXd d0, double lipschitz);
  static FeatureMap select(const std::vector<int>& indices, int input_dim);

  int input_dim() const { return static_cast<int>(c.cols()); }
  int output_dim() const { return static_cast<int>(c.rows()); }

  Eigen::VectorXd operator()(const Eigen::VectorXd& s) const;

  /// Throws unless the declared constant dominates the induced operator norm.
  void validate_lipschitz(const Metric& in, const Metric& out) const;
};

/// Pointwise application, timestamps preserved.
TimedTrace apply_feature_map(const FeatureMap& f, const TimedTrace& trace);

/// q(k) = qhat(stack(x(k), h(k))) over the agent timestamps; `h` may carry
/// extra history samples before the agent's first timestamp, matched by time.
TimedTrace build_q_trace(const TimedTrace& agent, const TimedTrace& h, const FeatureMap& qhat);

}  // namespace mtlloop
