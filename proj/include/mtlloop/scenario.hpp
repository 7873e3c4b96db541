#pragma once

#include <string>
#include <vector>

#include "mtlloop/automaton.hpp"
#include "mtlloop/feature_map.hpp"
#include "mtlloop/parser.hpp"
#include "mtlloop/plant.hpp"

namespace mtlloop {

/// Everything the infer/simulate/verify commands share: plant, metrics,
/// predicate map over the q space, spec, feature maps and inference
/// parameters. All cross-validations run at load.
struct ScenarioConfig {
  LinearSystem sys;
  Rat period;
  std::size_t horizon;  // number of plant steps K

  Metric state_metric;    // on the agent state space
  Metric env_metric;      // on the raw environment space
  Metric feature_metric;  // on the environment feature space Sigma_y
  Metric q_metric;        // on the joint feature space

  PredicateMap predicates;  // over the joint feature space
  std::string spec_text;
  FormulaPtr spec;
  SequentialSpec seq;

  FeatureMap h;     // environment -> Sigma_y
  FeatureMap qhat;  // stack(state, Sigma_y) -> joint feature space
  double lx;        // Lipschitz of qhat in the state block
  double lh;        // Lipschitz of qhat in the feature block

  int history_depth;  // D
  std::vector<Interval> grid_windows;
  int grid_max_depth;
  double epsilon;
  std::string tradeoff;  // "equal" or "ratio"
  double tradeoff_ratio; // delta_c : delta_e when tradeoff == "ratio"

  std::string fingerprint;  // hash of the canonical content

  Rat horizon_time() const { return Rat(static_cast<std::int64_t>(horizon)) * period; }
};

ScenarioConfig load_scenario(const std::string& path);

/// Recompute the fingerprint after a field override (e.g. a CLI epsilon).
void refresh_fingerprint(ScenarioConfig& cfg);

}  // namespace mtlloop
