#pragma once

#include "mtlloop/inference.hpp"

namespace mtlloop {

/// Outcome of running the classifier in the loop against a fixed
/// environment feature trace.
struct SimulationResult {
  TimedTrace agent;                     // x(0..K)
  TimedTrace q;                         // joint feature trace
  std::vector<Eigen::VectorXd> inputs;  // u(0..K-1)
  std::vector<std::size_t> locations;   // location the controller acted from at each step
  std::vector<std::size_t> branches;    // branch index chosen at each step
  std::vector<double> decision_margins; // robustness of the chosen branch formula
  RunRecord run;                        // automaton run over the final q
  bool satisfied = false;
  double robustness = 0.0;
};

/// Input for one step: route the feature history at sample k (index into h)
/// through the location's branch list.
std::size_t step_closed_loop(const ScenarioConfig& scenario, const Classifier& classifier,
                             std::size_t location, const TimedTrace& h, std::size_t k);

/// Run the plant for the scenario horizon from x0, choosing each input with
/// the classifier. `h` must carry history samples back to -D*period and
/// cover the horizon on the scenario's period grid.
SimulationResult simulate_closed_loop(const ScenarioConfig& scenario, const Classifier& classifier,
                                      const Eigen::VectorXd& x0, const TimedTrace& h);

}  // namespace mtlloop
