#pragma once

#include <string>
#include <vector>

#include "mtlloop/scenario.hpp"
#include "mtlloop/trace.hpp"

namespace mtlloop {

/// One nominal demonstration: agent trajectory, environment trajectory with
/// history padding, recorded inputs, and the derived feature traces.
struct Demonstration {
  TimedTrace agent;                     // timestamps 0 .. K*period
  TimedTrace env;                       // includes >= D pre-zero history rows
  TimedTrace h;                         // H(env), same timestamps as env
  TimedTrace q;                         // joint features over the agent timestamps
  std::vector<Eigen::VectorXd> inputs;  // one per plant step
  double robustness;                    // [[phi]](q, 0), strictly positive
};

struct DemonstrationSet {
  std::vector<Demonstration> demos;
  int history_depth;
};

/// Validate and derive the feature traces for one (agent, env, input) triple.
/// Rejects demonstrations whose spec robustness is not strictly positive.
Demonstration make_demonstration(TimedTrace agent, TimedTrace env,
                                 std::vector<Eigen::VectorXd> inputs, const ScenarioConfig& scenario);

/// Load `demo_<i>/agent.csv`, `demo_<i>/env.csv`, `demo_<i>/input.csv`
/// from a directory, in index order.
DemonstrationSet load_demos(const std::string& dir, const ScenarioConfig& scenario);

}  // namespace mtlloop
