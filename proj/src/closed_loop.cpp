#include "mtlloop/closed_loop.hpp"

#include "mtlloop/semantics.hpp"

namespace mtlloop {

std::size_t step_closed_loop(const ScenarioConfig& scenario, const Classifier& classifier,
                             std::size_t location, const TimedTrace& h, std::size_t k) {
  return classifier.select_branch(location, h, k, scenario.feature_metric);
}

SimulationResult simulate_closed_loop(const ScenarioConfig& scenario, const Classifier& classifier,
                                      const Eigen::VectorXd& x0, const TimedTrace& h) {
  const LinearSystem& sys = scenario.sys;
  if (x0.size() != sys.state_dim()) throw DimensionError("closed loop: initial state dimension mismatch");
  if (h.dim() != scenario.feature_metric.dim()) throw DimensionError("closed loop: feature trace dimension mismatch");

  std::size_t zero = h.first_nonnegative_index();
  if (!(h.time(zero) == Rat(0))) throw Error("closed loop: feature trace has no sample at t=0");
  if (static_cast<int>(zero) < scenario.history_depth) {
    throw Error("closed loop: feature trace must carry at least " + std::to_string(scenario.history_depth) +
                " history samples before t=0");
  }
  std::size_t steps = scenario.horizon;
  if (h.size() - zero < steps + 1) throw Error("closed loop: feature trace shorter than the horizon");
  std::vector<Rat> times(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    times[k] = Rat(static_cast<std::int64_t>(k)) * scenario.period;
    if (!(h.time(zero + k) == times[k])) {
      throw Error("closed loop: feature trace is off the period grid at sample " + std::to_string(zero + k));
    }
  }

  SimulationResult result{TimedTrace({Rat(0)}, x0), TimedTrace({Rat(0)}, x0), {}, {}, {}, {}, {}, false, 0.0};

  Eigen::MatrixXd states(sys.state_dim(), static_cast<Eigen::Index>(steps + 1));
  states.col(0) = x0;
  Eigen::MatrixXd qstates(scenario.qhat.output_dim(), static_cast<Eigen::Index>(steps + 1));

  auto q_at = [&](std::size_t k) {
    Eigen::VectorXd stacked(sys.state_dim() + h.dim());
    stacked << states.col(static_cast<Eigen::Index>(k)), h.state(zero + k);
    return scenario.qhat(stacked);
  };

  qstates.col(0) = q_at(0);
  for (std::size_t k = 0; k < steps; ++k) {
    // The greedy run is online: its prefix over q(0..k) does not depend on
    // later samples, so re-tracking the prefix gives the live location.
    TimedTrace qpref(std::vector<Rat>(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(k) + 1),
                     qstates.leftCols(static_cast<Eigen::Index>(k + 1)));
    RunRecord prefix = track_location(scenario.seq, qpref, scenario.predicates, scenario.q_metric);
    std::size_t location = prefix.timeline[k].location;
    double margin = 0.0;
    std::size_t branch = classifier.select_branch(location, h, zero + k, scenario.feature_metric, &margin);
    const Eigen::VectorXd& u = sys.inputs[classifier.branches_at(location)[branch].input];

    result.locations.push_back(location);
    result.branches.push_back(branch);
    result.decision_margins.push_back(margin);
    result.inputs.push_back(u);
    states.col(static_cast<Eigen::Index>(k + 1)) = sys.step(states.col(static_cast<Eigen::Index>(k)), u);
    qstates.col(static_cast<Eigen::Index>(k + 1)) = q_at(k + 1);
  }

  result.agent = TimedTrace(times, std::move(states));
  result.q = TimedTrace(times, std::move(qstates));
  result.run = track_location(scenario.seq, result.q, scenario.predicates, scenario.q_metric);
  result.satisfied = eval_boolean(*scenario.spec, result.q, 0, scenario.predicates, scenario.q_metric);
  result.robustness = eval_robust(*scenario.spec, result.q, 0, scenario.predicates, scenario.q_metric);
  return result;
}

}  // namespace mtlloop
