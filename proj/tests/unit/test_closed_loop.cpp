#include <doctest.h>

#include <filesystem>

#include "mtlloop/closed_loop.hpp"
#include "mtlloop/semantics.hpp"
#include "mtlloop/trace_io.hpp"
#include "shared_fixture.hpp"

using namespace mtlloop;
using fixture::shared_fixture;

namespace {

// Drop or reshape the feature trace of demo 0 for the validation tests.
TimedTrace demo_h() { return shared_fixture().demos.demos[0].h; }

}  // namespace

TEST_CASE("closed loop replays every demonstration bitwise") {
  auto& s = shared_fixture();
  for (std::size_t i = 0; i < s.demos.demos.size(); ++i) {
    const Demonstration& demo = s.demos.demos[i];
    SimulationResult sim = simulate_closed_loop(s.scenario, s.classifier, demo.agent.state(0), demo.h);
    REQUIRE(sim.inputs.size() == demo.inputs.size());
    for (std::size_t k = 0; k < demo.inputs.size(); ++k) {
      CHECK(sim.inputs[k] == demo.inputs[k]);
    }
    REQUIRE(sim.agent.size() == demo.agent.size());
    for (std::size_t k = 0; k < demo.agent.size(); ++k) {
      CHECK(sim.agent.state(k) == demo.agent.state(k));  // exact, not approximate
    }
    CHECK(sim.satisfied);
    CHECK(sim.robustness == demo.robustness);
    CHECK(sim.run.accepted);
  }
}

TEST_CASE("per-step locations follow the automaton run and margins are positive") {
  auto& s = shared_fixture();
  const Demonstration& demo = s.demos.demos[0];  // gate open from t = 0
  SimulationResult sim = simulate_closed_loop(s.scenario, s.classifier, demo.agent.state(0), demo.h);
  REQUIRE(sim.locations.size() == s.scenario.horizon);
  CHECK(sim.locations[0] == 0);
  CHECK(sim.locations[5] == 1);   // the band at px = 5 is reached at step 5
  CHECK(sim.locations[10] == 2);
  for (std::size_t k = 0; k < sim.locations.size(); ++k) {
    CHECK(sim.locations[k] == sim.run.timeline[k].location);
    CHECK(sim.decision_margins[k] > 0.0);
    CHECK(sim.branches[k] < s.classifier.branches_at(sim.locations[k]).size());
  }
  // step_closed_loop agrees with the per-step decisions.
  std::size_t zero = demo.h.first_nonnegative_index();
  CHECK(step_closed_loop(s.scenario, s.classifier, 0, demo.h, zero) == sim.branches[0]);
}

TEST_CASE("a gate that never opens leaves the spec violated") {
  auto& s = shared_fixture();
  auto dir = fixture::fresh_dir("closed_env");
  fixture::write_closed_env(dir / "env.csv");
  NamedTrace env = load_trace((dir / "env.csv").string());
  // The fixture's feature map is the identity, so the env trace doubles as h.
  SimulationResult sim = simulate_closed_loop(s.scenario, s.classifier, Eigen::VectorXd::Zero(1), env.trace);
  CHECK(!sim.satisfied);
  CHECK(sim.robustness < 0.0);
  CHECK(!sim.run.reached_final);
  CHECK(!sim.run.accepted);
  // The controller correctly held still the whole time.
  for (const auto& u : sim.inputs) CHECK(u(0) == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("feature trace validation") {
  auto& s = shared_fixture();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  TimedTrace h = demo_h();

  // Missing history: start the trace at t = -1 instead of -2.
  CHECK_THROWS_WITH_AS(simulate_closed_loop(s.scenario, s.classifier, x0, h.slice(1, h.size() - 1)),
                       doctest::Contains("history"), Error);
  // Horizon not covered.
  CHECK_THROWS_WITH_AS(simulate_closed_loop(s.scenario, s.classifier, x0, h.slice(0, h.size() - 2)),
                       doctest::Contains("shorter than the horizon"), Error);
  // No sample at t = 0.
  std::vector<Rat> shifted;
  for (std::size_t k = 0; k < h.size(); ++k) shifted.push_back(h.time(k) + Rat(1, 2));
  CHECK_THROWS_WITH_AS(simulate_closed_loop(s.scenario, s.classifier, x0, TimedTrace(shifted, h.states())),
                       doctest::Contains("t=0"), Error);
  // Off the period grid after t = 0.
  std::vector<Rat> warped;
  for (std::size_t k = 0; k < h.size(); ++k) {
    Rat t = h.time(k);
    warped.push_back(t > Rat(20) ? t + Rat(1, 2) : t);
  }
  CHECK_THROWS_WITH_AS(simulate_closed_loop(s.scenario, s.classifier, x0, TimedTrace(warped, h.states())),
                       doctest::Contains("period grid"), Error);
  // Wrong feature dimension.
  Eigen::MatrixXd wide(2, static_cast<Eigen::Index>(h.size()));
  wide.setZero();
  CHECK_THROWS_AS(simulate_closed_loop(s.scenario, s.classifier, x0, TimedTrace(h.times(), wide)),
                  DimensionError);
  CHECK_THROWS_AS(simulate_closed_loop(s.scenario, s.classifier, Eigen::VectorXd::Zero(2), h),
                  DimensionError);
}

TEST_CASE("reaching a location the classifier does not cover fails loudly") {
  auto& s = shared_fixture();
  Classifier crippled = s.classifier;
  crippled.locations[1].clear();
  const Demonstration& demo = s.demos.demos[0];
  CHECK_THROWS_WITH_AS(simulate_closed_loop(s.scenario, crippled, demo.agent.state(0), demo.h),
                       doctest::Contains("not covered"), Error);
}
