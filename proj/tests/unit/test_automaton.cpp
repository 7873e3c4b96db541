#include <doctest.h>

#include "mtlloop/automaton.hpp"
#include "mtlloop/parser.hpp"
#include "mtlloop/rng.hpp"
#include "mtlloop/semantics.hpp"

using namespace mtlloop;

namespace {

double inf() { return std::numeric_limits<double>::infinity(); }

PredicateMap gate_pmap() {
  PredicateMap pmap(2);
  pmap.add(AtomicPredicate::box("r1", Eigen::Vector2d(4.6, -inf()), Eigen::Vector2d(5.4, inf())));
  pmap.add(AtomicPredicate::box("r2", Eigen::Vector2d(9.6, -inf()), Eigen::Vector2d(10.4, inf())));
  pmap.add(AtomicPredicate::box("obs", Eigen::Vector2d(2.5, -inf()), Eigen::Vector2d(3.5, 1.0)));
  return pmap;
}

const char* kGateSpec = "F[0,10)(r1 & F[0,15) r2) & G[0,40) !obs";

TimedTrace integer_trace(const std::vector<Eigen::Vector2d>& states) {
  std::vector<Rat> times;
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    times.push_back(Rat(static_cast<std::int64_t>(k)));
    m.col(static_cast<Eigen::Index>(k)) = states[k];
  }
  return TimedTrace(std::move(times), std::move(m));
}

}  // namespace

TEST_CASE("parse_sequential extracts chain and safety conjuncts") {
  PredicateMap pmap = gate_pmap();
  SequentialSpec spec = parse_sequential(parse_formula(kGateSpec, pmap));
  REQUIRE(spec.chain.size() == 2);
  CHECK(spec.chain[0].predicate == "r1");
  CHECK(spec.chain[0].interval == Interval(Rat(0), Rat(10)));
  CHECK(spec.chain[1].predicate == "r2");
  CHECK(spec.chain[1].interval == Interval(Rat(0), Rat(15)));
  REQUIRE(spec.safety.size() == 1);
  CHECK(spec.safety[0].predicate == "obs");
  CHECK(spec.safety[0].interval == Interval(Rat(0), Rat(40)));
  // Round trip through the formula builder reproduces the text.
  CHECK(spec.to_formula()->to_string() == parse_formula(kGateSpec, pmap)->to_string());
}

TEST_CASE("parse_sequential rejects formulas outside the fragment") {
  PredicateMap pmap = gate_pmap();
  auto rejects = [&](const std::string& text) {
    CHECK_THROWS_WITH_AS(parse_sequential(parse_formula(text, pmap)),
                         doctest::Contains("outside sequential fragment"), Error);
  };
  rejects("r1");                              // bare atom
  rejects("F[0,10) r1 | G[0,40) !obs");       // disjunction
  rejects("G[0,40) obs");                     // safety body must be a negated atom
  rejects("F[0,10) r1 & F[0,15) r2");         // two reach chains
  rejects("F[0,10)(F[0,15) r2 & r1)");        // stage atom must be on the left
  rejects("G[0,40) !obs");                    // no reach chain at all
  rejects("F[0,10) !r1");                     // negation inside the chain
}

TEST_CASE("automaton construction mirrors the spec structure") {
  PredicateMap pmap = gate_pmap();
  SequentialSpec spec = parse_sequential(parse_formula(kGateSpec, pmap));
  Ocata aut = build_ocata(spec);
  CHECK(aut.locations == std::vector<std::string>{"l0", "l1", "l2", "lsafe"});
  CHECK(aut.initial == "l0");
  CHECK(aut.accepting == std::vector<std::string>{"l2", "lsafe"});
  CHECK(aut.atoms == std::vector<std::string>{"obs", "r1", "r2"});
  // Two entries per (location, atom-polarity) pair that matters.
  std::string dump = aut.dump();
  CHECK(dump.find("delta(l0, r1) = (((c >= 0) & (c < 10)) & (c.(l1))) | ((c < 10) & (l0))") != std::string::npos);
  CHECK(dump.find("delta(l0, !r1) = (c < 10) & (l0)") != std::string::npos);
  CHECK(dump.find("delta(l1, r2) = (((c >= 0) & (c < 15)) & (c.(l2))) | ((c < 15) & (l1))") != std::string::npos);
  CHECK(dump.find("delta(lsafe, obs) = (c >= 40) & (lsafe)") != std::string::npos);
  CHECK(dump.find("delta(lsafe, !obs) = lsafe") != std::string::npos);
  CHECK(dump.find("delta(l2, r1) = true") != std::string::npos);
  CHECK_THROWS(build_ocata(SequentialSpec{}));
}

TEST_CASE("earliest-firing timeline and transition margins") {
  PredicateMap pmap = gate_pmap();
  SequentialSpec spec = parse_sequential(parse_formula(kGateSpec, pmap));
  // Ramp that crosses both bands: px = k, gate high while crossing the band.
  std::vector<Eigen::Vector2d> states;
  for (int k = 0; k <= 12; ++k) states.push_back(Eigen::Vector2d(k, 2.0));
  TimedTrace q = integer_trace(states);
  RunRecord run = track_location(spec, q, pmap, Metric::identity(2));
  CHECK(run.accepted);
  CHECK(run.reached_final);
  REQUIRE(run.transitions.size() == 2);
  CHECK(run.transitions[0].step == 5);   // px = 5 inside [4.6, 5.4]
  CHECK(run.transitions[1].step == 10);  // px = 10 inside [9.6, 10.4]
  CHECK(run.transitions[0].predicate_margin == doctest::Approx(0.4));
  CHECK(run.transitions[0].time_slack == doctest::Approx(5.0));
  CHECK(run.transitions[1].time_slack == doctest::Approx(10.0));
  CHECK(run.timeline[4].location == 0);
  CHECK(run.timeline[5].location == 1);
  CHECK(run.timeline[10].location == 2);
  CHECK(run.timeline[6].clock == Rat(1));
  CHECK(run.safety_violation_steps.empty());
  CHECK(run.min_transition_margin == doctest::Approx(0.4));
}

TEST_CASE("safety violations are recorded per step") {
  PredicateMap pmap = gate_pmap();
  SequentialSpec spec = parse_sequential(parse_formula(kGateSpec, pmap));
  std::vector<Eigen::Vector2d> states;
  for (int k = 0; k <= 12; ++k) states.push_back(Eigen::Vector2d(k, 0.5));  // gate low in the obstacle
  TimedTrace q = integer_trace(states);
  RunRecord run = track_location(spec, q, pmap, Metric::identity(2));
  CHECK(run.reached_final);
  CHECK(!run.accepted);
  CHECK(run.safety_violation_steps == std::vector<std::size_t>{3});  // px = 3 inside [2.5, 3.5]
}

TEST_CASE("acceptance explores late firings the greedy run misses") {
  PredicateMap pmap(1);
  pmap.add(AtomicPredicate::box("p1", Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0)));
  pmap.add(AtomicPredicate::box("p2", Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 4.0)));
  SequentialSpec spec = parse_sequential(parse_formula("F[0,10)(p1 & F[0,2) p2)", pmap));
  // p1 holds at t = 0 and t = 5, p2 only at t = 6. Firing p1 at t = 0 makes
  // the [0,2) window for p2 close before t = 6; firing at t = 5 succeeds.
  std::vector<double> xs = {1.5, 0, 0, 0, 0, 1.5, 3.5, 0};
  std::vector<Rat> times;
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    times.push_back(Rat(static_cast<std::int64_t>(k)));
    m(0, static_cast<Eigen::Index>(k)) = xs[k];
  }
  TimedTrace q(std::move(times), std::move(m));
  RunRecord run = track_location(spec, q, pmap, Metric::identity(1));
  CHECK(run.timeline[0].location == 1);  // greedy fires immediately
  CHECK(run.timeline.back().location == 1);
  REQUIRE(run.deadline_violation_step.has_value());
  CHECK(*run.deadline_violation_step == 2);
  CHECK(run.reached_final);  // the late schedule is admissible
  CHECK(run.accepted);
  CHECK(eval_boolean(*parse_formula("F[0,10)(p1 & F[0,2) p2)", pmap), q, 0, pmap, Metric::identity(1)));
}

TEST_CASE("acceptance coincides with the boolean semantics on random traces") {
  PredicateMap pmap = gate_pmap();
  FormulaPtr phi = parse_formula(kGateSpec, pmap);
  SequentialSpec spec = parse_sequential(phi);
  Metric metric = Metric::identity(2);
  Rng rng(4242);
  int accepted = 0;
  for (int i = 0; i < 300; ++i) {
    std::vector<Eigen::Vector2d> states;
    for (int k = 0; k <= 40; ++k)
      states.push_back(Eigen::Vector2d(rng.uniform(0.0, 12.0), rng.uniform(0.0, 3.0)));
    TimedTrace q = integer_trace(states);
    RunRecord run = track_location(spec, q, pmap, metric);
    bool sat = eval_boolean(*phi, q, 0, pmap, metric);
    CHECK(run.accepted == sat);
    accepted += run.accepted ? 1 : 0;
  }
  CHECK(accepted > 10);  // both verdicts actually exercised
  CHECK(accepted < 290);
}
