#include "mtlloop/feature_map.hpp"

namespace mtlloop {

double operator_norm(const Eigen::MatrixXd& c, const Metric& in, const Metric& out) {
  if (c.cols() != in.dim() || c.rows() != out.dim()) throw DimensionError("operator_norm dimension mismatch");
  // sup ||Cv||_out / ||v||_in = sqrt(lambda_max(C^T M_out C, M_in))
  Eigen::MatrixXd lhs = c.transpose() * out.matrix() * c;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(lhs, in.matrix());
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

FeatureMap FeatureMap::affine(Eigen::MatrixXd c, Eigen::VectorXd d0, double lipschitz) {
  if (c.rows() != d0.size()) throw DimensionError("feature map offset dimension mismatch");
  return FeatureMap{std::move(c), std::move(d0), lipschitz};
}

FeatureMap FeatureMap::select(const std::vector<int>& indices, int input_dim) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(indices.size()), input_dim);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] < 0 || indices[r] >= input_dim) throw Error("select index out of range");
    c(static_cast<Eigen::Index>(r), indices[r]) = 1.0;
  }
  return FeatureMap{std::move(c), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(indices.size())), 1.0};
}

Eigen::VectorXd FeatureMap::operator()(const Eigen::VectorXd& s) const {
  if (s.size() != c.cols()) throw DimensionError("feature map input dimension mismatch");
  return c * s + d0;
}

void FeatureMap::validate_lipschitz(const Metric& in, const Metric& out) const {
  double bound = operator_norm(c, in, out);
  if (lipschitz + 1e-9 < bound) {
    throw Error("declared Lipschitz constant " + std::to_string(lipschitz) +
                " is below the induced operator norm " + std::to_string(bound));
  }
}

TimedTrace apply_feature_map(const FeatureMap& f, const TimedTrace& trace) {
  if (trace.dim() != f.input_dim()) throw DimensionError("apply_feature_map dimension mismatch");
  Eigen::MatrixXd out = (f.c * trace.states()).colwise() + f.d0;
  return TimedTrace(trace.times(), std::move(out));
}

TimedTrace build_q_trace(const TimedTrace& agent, const TimedTrace& h, const FeatureMap& qhat) {
  if (agent.dim() + h.dim() != qhat.input_dim()) throw DimensionError("build_q_trace dimension mismatch");
  std::size_t offset = h.size();
  // Locate agent's first timestamp inside h (history rows precede it).
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h.time(j) == agent.time(0)) {
      offset = j;
      break;
    }
  }
  if (offset == h.size() || h.size() - offset < agent.size()) {
    throw Error("build_q_trace: environment trace does not cover the agent timestamps");
  }
  Eigen::MatrixXd out(qhat.output_dim(), static_cast<Eigen::Index>(agent.size()));
  Eigen::VectorXd stacked(qhat.input_dim());
  for (std::size_t k = 0; k < agent.size(); ++k) {
    if (!(h.time(offset + k) == agent.time(k))) throw Error("build_q_trace: timestamp mismatch at sample " + std::to_string(k));
    stacked.head(agent.dim()) = agent.state(k);
    stacked.tail(h.dim()) = h.state(offset + k);
    out.col(static_cast<Eigen::Index>(k)) = qhat(stacked);
  }
  return TimedTrace(agent.times(), std::move(out));
}

}  // namespace mtlloop
