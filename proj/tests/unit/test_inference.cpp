#include <doctest.h>

#include <filesystem>

#include "shared_fixture.hpp"

using namespace mtlloop;
using fixture::shared_fixture;

namespace {

double inf() { return std::numeric_limits<double>::infinity(); }

// Hand-built demonstration against the loaded scenario: gate constant, agent
// advances under the given input script.
Demonstration scripted_demo(const ScenarioConfig& scenario, const std::vector<double>& u_script,
                            double gate = 2.0) {
  std::vector<Rat> env_times;
  Eigen::MatrixXd env_states(1, 43);
  for (int t = -2; t <= 40; ++t) {
    env_times.push_back(Rat(t));
    env_states(0, t + 2) = gate;
  }
  std::vector<Eigen::VectorXd> inputs;
  for (double u : u_script) inputs.push_back(Eigen::VectorXd::Constant(1, u));
  TimedTrace agent = simulate_open_loop(scenario.sys, Eigen::VectorXd::Zero(1), inputs,
                                        scenario.horizon, Rat(0), scenario.period);
  return make_demonstration(agent, TimedTrace(std::move(env_times), std::move(env_states)),
                            inputs, scenario);
}

std::vector<double> go_after(int wait) {
  std::vector<double> u(40, 1.0);
  for (int k = 0; k < wait; ++k) u[static_cast<std::size_t>(k)] = 0.0;
  return u;
}

}  // namespace

TEST_CASE("threshold grid uses midpoints of observed feature values") {
  auto& s = shared_fixture();
  PrimitiveGrid grid = build_grid(s.scenario, s.demos);
  CHECK(grid.windows == s.scenario.grid_windows);
  CHECK(grid.max_depth == 2);
  REQUIRE(grid.thresholds.size() == 1);
  const auto& th = grid.thresholds[0];
  CHECK(th.size() > 100);  // one midpoint per consecutive distinct pair
  CHECK(std::is_sorted(th.begin(), th.end()));
  CHECK(th.front() > 0.2);
  CHECK(th.back() < 2.2);
}

TEST_CASE("samples are grouped by the live automaton location") {
  auto& s = shared_fixture();
  LocationSamples samples = collect_location_samples(s.demos, s.scenario);
  REQUIRE(samples.by_location.size() == 3);
  // Gate opens at step i % 5, the band is reached five steps later:
  // 4 * (5+6+7+8+9) pre-band samples across the 20 demos.
  CHECK(samples.by_location[0].size() == 140);
  CHECK(samples.by_location[1].size() == 100);
  CHECK(samples.by_location[2].size() == 560);
  CHECK(samples.uncovered.empty());
  // Labels follow the scripted policy: advance only while the gate is open.
  for (const auto& sample : samples.by_location[0]) {
    double g = s.demos.demos[sample.demo].h.state(sample.h_index)(0);
    CHECK(sample.label == (g >= 1.0 ? 1u : 0u));
  }
}

TEST_CASE("inferred tree separates gate-open from gate-closed") {
  auto& s = shared_fixture();
  const Classifier& c = s.classifier;
  REQUIRE(c.locations.size() == 3);
  CHECK(c.sample_counts == std::vector<std::size_t>{140, 100, 560});
  CHECK(c.uncovered.empty());
  CHECK(c.nominal.size() == 20);
  CHECK(c.exclusivity_structural);

  // Location 0: one depth-1 split on a gate threshold between the closed and
  // open value bands.
  const auto& loc0 = c.branches_at(0);
  REQUIRE(loc0.size() == 2);
  REQUIRE(loc0[0].path.size() == 1);
  REQUIRE(loc0[1].path.size() == 1);
  const Primitive& p = loc0[0].path[0].first;
  CHECK(loc0[1].path[0].first == p);      // same primitive, negated
  CHECK(!loc0[0].path[0].second);
  CHECK(loc0[1].path[0].second);
  CHECK(p.feature == 0);
  CHECK(p.threshold > 0.8);
  CHECK(p.threshold < 1.8);
  CHECK(loc0[0].input == 1);              // advance when the gate was open
  CHECK(loc0[1].input == 0);
  CHECK(loc0[0].margin > 0.0);
  CHECK(loc0[1].margin > 0.0);

  // Later locations are constant-input leaves with unbounded margin.
  for (std::size_t loc : {1u, 2u}) {
    const auto& branches = c.branches_at(loc);
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].path.empty());
    CHECK(branches[0].input == 1);
    CHECK(branches[0].margin == inf());
  }
  CHECK_THROWS(c.branches_at(3));
}

TEST_CASE("branch margins match the robust semantics of the branch formulas") {
  auto& s = shared_fixture();
  const Classifier& c = s.classifier;
  LocationSamples samples = collect_location_samples(s.demos, s.scenario);
  double rebuilt = inf();
  for (const auto& sample : samples.by_location[0]) {
    const Demonstration& demo = s.demos.demos[sample.demo];
    double rob = 0.0;
    std::size_t b = c.select_branch(0, demo.h, sample.h_index, s.scenario.feature_metric, &rob);
    CHECK(c.branches_at(0)[b].input == sample.label);  // exact training fit
    CHECK(rob > 0.0);
    rebuilt = std::min(rebuilt, rob);
  }
  double stored = std::min(c.branches_at(0)[0].margin, c.branches_at(0)[1].margin);
  CHECK(rebuilt == stored);  // the fast training path equals eval_robust bitwise
  CHECK(c.margin == stored);
}

TEST_CASE("certified radii on the equal trade-off ray") {
  auto& s = shared_fixture();
  DemonstrationSet demos = s.demos;
  Classifier c = s.classifier;
  RadiiReport r = compute_radii(c, demos, s.scenario);
  CHECK(r.rho_min == doctest::Approx(0.4));
  CHECK(r.alpha == doctest::Approx(1.0));
  CHECK(r.margin == doctest::Approx(0.5030707734572224));
  // rho_min / (L_x * alpha + L_h) with L_x = L_h = 1 binds before the margin.
  CHECK(r.delta_c == doctest::Approx(0.2));
  CHECK(r.delta_e == r.delta_c);
  CHECK(r.delta_c_only == doctest::Approx(0.4));
  CHECK(r.delta_e_only == doctest::Approx(0.4));
  CHECK(c.delta_c == r.delta_c);
  CHECK(c.rho_min == r.rho_min);
}

TEST_CASE("certified radii on a 2:1 trade-off ray") {
  auto& s = shared_fixture();
  ScenarioConfig scenario = s.scenario;
  scenario.tradeoff = "ratio";
  scenario.tradeoff_ratio = 2.0;
  Classifier c = s.classifier;
  RadiiReport r = compute_radii(c, s.demos, scenario);
  CHECK(r.delta_e == doctest::Approx(0.4 / 3.0));
  CHECK(r.delta_c == doctest::Approx(2.0 * r.delta_e));
  // The budget constraint is tight.
  CHECK(scenario.lx * r.alpha * r.delta_c + scenario.lh * r.delta_e == doctest::Approx(r.rho_min));
}

TEST_CASE("conditions hold under sampled perturbations inside the radii") {
  auto& s = shared_fixture();
  ConditionReport rep = check_conditions(s.classifier, s.demos, s.scenario, 200, 11, 0.99);
  CHECK(rep.requirement);
  CHECK(rep.soundness);
  CHECK(rep.coverage);
  CHECK(rep.exclusivity);
  CHECK(rep.all());
  CHECK(rep.samples == 200);
  CHECK(rep.counterexample.empty());
}

TEST_CASE("conditions break far outside the certified radii") {
  auto& s = shared_fixture();
  ConditionReport rep = check_conditions(s.classifier, s.demos, s.scenario, 200, 11, 4.0);
  CHECK(!rep.all());
  CHECK(!rep.counterexample.empty());
}

TEST_CASE("a single constant-input demonstration yields bare true leaves") {
  auto& s = shared_fixture();
  DemonstrationSet demos{{scripted_demo(s.scenario, go_after(0))}, s.scenario.history_depth};
  Classifier c = infer_classifier(demos, s.scenario);
  for (std::size_t loc = 0; loc < 3; ++loc) {
    const auto& branches = c.branches_at(loc);
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].path.empty());
    CHECK(branches[0].input == 1);
  }
  CHECK(c.rho_min == doctest::Approx(0.4));
  CHECK(c.delta_c == doctest::Approx(0.2));
  // Any history routes to the single branch.
  auto [count, index] = c.route_count(0, demos.demos[0].h, 5, s.scenario.feature_metric);
  CHECK(count == 1);
  CHECK(index == 0);
}

TEST_CASE("indistinguishable histories with distant inputs are rejected") {
  auto& s = shared_fixture();
  // Two demonstrations with identical environments but different step-0
  // inputs: no feature primitive can separate them.
  DemonstrationSet demos{{scripted_demo(s.scenario, go_after(0)), scripted_demo(s.scenario, go_after(1))},
                         s.scenario.history_depth};
  CHECK_THROWS_WITH_AS(infer_classifier(demos, s.scenario), doctest::Contains("inseparable"), Error);
  // A loose epsilon dissolves the conflict: one input covers both labels.
  ScenarioConfig loose = s.scenario;
  loose.epsilon = 1.0;
  Classifier c = infer_classifier(demos, loose);
  const auto& loc0 = c.branches_at(0);
  REQUIRE(loc0.size() == 1);
  CHECK(loc0[0].path.empty());
}

TEST_CASE("classifier file round trip preserves every field") {
  auto& s = shared_fixture();
  auto dir = fixture::fresh_dir("clf");
  std::string path = (dir / "classifier.txt").string();
  save_classifier(path, s.classifier);
  Classifier back = load_classifier(path, s.scenario);
  CHECK(classifier_to_text(back) == classifier_to_text(s.classifier));
  CHECK(back.exclusivity_structural);
  CHECK(back.nominal.size() == 20);
  CHECK(back.delta_c == s.classifier.delta_c);
  CHECK(back.margin == s.classifier.margin);
  // Branch selection behaves identically after the round trip.
  for (std::size_t k = 2; k < 10; ++k) {
    CHECK(back.select_branch(0, s.demos.demos[0].h, k, s.scenario.feature_metric) ==
          s.classifier.select_branch(0, s.demos.demos[0].h, k, s.scenario.feature_metric));
  }
  // A scenario whose canonical content changed no longer matches.
  ScenarioConfig other = s.scenario;
  other.epsilon = 0.25;
  refresh_fingerprint(other);
  CHECK_THROWS_WITH_AS(load_classifier(path, other), doctest::Contains("fingerprint"), Error);
  std::filesystem::remove_all(dir);
}
