#include "mtlloop/plant.hpp"

#include "mtlloop/feature_map.hpp"

namespace mtlloop {

LinearSystem::LinearSystem(Eigen::MatrixXd a_, Eigen::MatrixXd b_, std::vector<Eigen::VectorXd> inputs_)
    : a(std::move(a_)), b(std::move(b_)), inputs(std::move(inputs_)) {
  if (a.rows() != a.cols()) throw DimensionError("A must be square");
  if (b.rows() != a.rows()) throw DimensionError("B row count must match state dimension");
  if (inputs.empty()) throw Error("input set U is empty");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != b.cols()) throw DimensionError("input vector dimension mismatch");
    for (std::size_t j = 0; j < i; ++j) {
      if (inputs[i] == inputs[j]) throw Error("input set U has duplicate elements");
    }
  }
}

std::size_t LinearSystem::input_index(const Eigen::VectorXd& u) const {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i] == u) return i;
  }
  throw Error("input value not in U");
}

Eigen::VectorXd LinearSystem::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != a.rows() || u.size() != b.cols()) throw DimensionError("plant step dimension mismatch");
  return (a * x) + (b * u);
}

TimedTrace simulate_open_loop(const LinearSystem& sys, const Eigen::VectorXd& x0,
                              const std::vector<Eigen::VectorXd>& u, std::size_t steps,
                              const Rat& t0, const Rat& period) {
  if (steps < 1) throw Error("simulate_open_loop requires at least one step");
  if (u.size() < steps) throw Error("input sequence shorter than horizon");
  Eigen::MatrixXd states(sys.state_dim(), static_cast<Eigen::Index>(steps + 1));
  std::vector<Rat> times;
  times.reserve(steps + 1);
  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k <= steps; ++k) {
    states.col(static_cast<Eigen::Index>(k)) = x;
    times.push_back(t0 + Rat(static_cast<std::int64_t>(k)) * period);
    if (k < steps) {
      sys.input_index(u[k]);  // membership check
      x = sys.step(x, u[k]);
    }
  }
  return TimedTrace(std::move(times), std::move(states));
}

double state_propagation_bound(const LinearSystem& sys, const Metric& metric, std::size_t horizon) {
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
  double alpha = 0.0;
  for (std::size_t k = 0; k <= horizon; ++k) {
    alpha = std::max(alpha, operator_norm(power, metric, metric));
    power = sys.a * power;
  }
  return alpha;
}

}  // namespace mtlloop
