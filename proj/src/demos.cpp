#include "mtlloop/demos.hpp"

#include <filesystem>

#include "mtlloop/semantics.hpp"
#include "mtlloop/trace_io.hpp"

namespace mtlloop {

Demonstration make_demonstration(TimedTrace agent, TimedTrace env,
                                 std::vector<Eigen::VectorXd> inputs, const ScenarioConfig& scenario) {
  if (agent.dim() != scenario.sys.state_dim()) throw DimensionError("demonstration: agent dimension mismatch");
  if (env.dim() != scenario.h.input_dim()) throw DimensionError("demonstration: environment dimension mismatch");
  if (!(agent.time(0) == Rat(0))) throw Error("demonstration: agent trace must start at t=0");
  if (agent.size() != scenario.horizon + 1) {
    throw Error("demonstration: agent trace must have horizon+1 samples");
  }
  if (inputs.size() != scenario.horizon) throw Error("demonstration: one input per plant step required");
  for (const auto& u : inputs) scenario.sys.input_index(u);

  std::size_t zero = env.first_nonnegative_index();
  if (!(env.time(zero) == Rat(0))) throw Error("demonstration: environment trace has no sample at t=0");
  if (static_cast<int>(zero) < scenario.history_depth) {
    throw Error("demonstration: environment trace must carry at least " +
                std::to_string(scenario.history_depth) + " history rows before t=0");
  }
  if (env.size() - zero < agent.size()) {
    throw Error("demonstration: environment trace shorter than the agent horizon");
  }

  TimedTrace h = apply_feature_map(scenario.h, env);
  TimedTrace q = build_q_trace(agent, h, scenario.qhat);
  double rho = eval_robust(*scenario.spec, q, 0, scenario.predicates, scenario.q_metric);
  if (!(rho > 0.0)) {
    throw Error("demonstration does not strictly satisfy the spec (robustness " + format_double(rho) + ")");
  }
  return Demonstration{std::move(agent), std::move(env), std::move(h), std::move(q), std::move(inputs), rho};
}

DemonstrationSet load_demos(const std::string& dir, const ScenarioConfig& scenario) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("demonstration directory '" + dir + "' not found");
  std::vector<std::pair<long, fs::path>> entries;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (e.is_directory() && name.rfind("demo_", 0) == 0) {
      entries.emplace_back(std::stol(name.substr(5)), e.path());
    }
  }
  if (entries.empty()) throw Error("no demo_<i> subdirectories in '" + dir + "'");
  std::sort(entries.begin(), entries.end());

  DemonstrationSet set;
  set.history_depth = scenario.history_depth;
  for (const auto& [idx, path] : entries) {
    NamedTrace agent = load_trace((path / "agent.csv").string());
    NamedTrace env = load_trace((path / "env.csv").string());
    NamedTrace input = load_trace((path / "input.csv").string());
    std::vector<Eigen::VectorXd> inputs;
    inputs.reserve(input.trace.size());
    for (std::size_t k = 0; k < input.trace.size(); ++k) inputs.push_back(input.trace.state(k));
    try {
      set.demos.push_back(make_demonstration(std::move(agent.trace), std::move(env.trace), std::move(inputs), scenario));
    } catch (const Error& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  return set;
}

}  // namespace mtlloop
