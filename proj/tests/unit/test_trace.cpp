#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixture.hpp"
#include "mtlloop/trace_io.hpp"

using namespace mtlloop;

namespace {

TimedTrace small_trace() {
  std::vector<Rat> times{Rat(0), Rat(1, 2), Rat(1), Rat(2)};
  Eigen::MatrixXd states(2, 4);
  states << 0.1, 0.2, 0.3, 1.0 / 3.0,
            -1.0, 0.0, 2.5, 1e-17;
  return TimedTrace(std::move(times), std::move(states));
}

}  // namespace

TEST_CASE("construction validates timestamps and shapes") {
  Eigen::MatrixXd s(1, 2);
  s << 1, 2;
  CHECK_THROWS(TimedTrace({}, Eigen::MatrixXd(1, 0)));
  CHECK_THROWS(TimedTrace({Rat(0), Rat(0)}, s));
  CHECK_THROWS(TimedTrace({Rat(1), Rat(0)}, s));
  CHECK_THROWS(TimedTrace({Rat(0)}, s));
  TimedTrace ok({Rat(-1), Rat(0)}, s);
  CHECK(ok.first_nonnegative_index() == 1);
}

TEST_CASE("slice keeps timestamps") {
  TimedTrace t = small_trace();
  TimedTrace s = t.slice(1, 2);
  CHECK(s.size() == 2);
  CHECK(s.time(0) == Rat(1, 2));
  CHECK(s.state(1)(0) == t.state(2)(0));
  CHECK_THROWS(t.slice(2, 1));
  CHECK_THROWS(t.slice(0, 4));
}

TEST_CASE("csv round trip is bitwise lossless") {
  TimedTrace t = small_trace();
  auto dir = fixture::fresh_dir("trace");
  save_trace((dir / "t.csv").string(), t, {"a", "b"});
  NamedTrace back = load_trace((dir / "t.csv").string());
  CHECK(back.columns == std::vector<std::string>{"a", "b"});
  REQUIRE(back.trace.size() == t.size());
  CHECK(back.trace.same_timestamps(t));
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(back.trace.state(k)(0) == t.state(k)(0));  // exact, not approximate
    CHECK(back.trace.state(k)(1) == t.state(k)(1));
  }
  // A second save of the reloaded trace is byte-identical.
  save_trace((dir / "t2.csv").string(), back.trace, back.columns);
  std::ifstream a(dir / "t.csv"), b(dir / "t2.csv");
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv loader handles comments and reports bad rows") {
  auto dir = fixture::fresh_dir("csv");
  write_file_atomic((dir / "ok.csv").string(), "# comment\nt,x\n0,1.5\n# mid comment\n0.5,2\n");
  NamedTrace nt = load_trace((dir / "ok.csv").string());
  CHECK(nt.trace.size() == 2);
  CHECK(nt.trace.time(1) == Rat(1, 2));

  write_file_atomic((dir / "bad.csv").string(), "t,x\n0,abc\n");
  CHECK_THROWS(load_trace((dir / "bad.csv").string()));
  write_file_atomic((dir / "short.csv").string(), "t,x,y\n0,1\n");
  CHECK_THROWS(load_trace((dir / "short.csv").string()));
  CHECK_THROWS(load_trace((dir / "missing.csv").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("trace distance is the max pointwise metric distance") {
  TimedTrace a({Rat(0), Rat(1)}, (Eigen::MatrixXd(1, 2) << 0.0, 1.0).finished());
  TimedTrace b({Rat(0), Rat(1)}, (Eigen::MatrixXd(1, 2) << 0.5, -1.0).finished());
  CHECK(trace_distance(a, b, Metric::identity(1)) == doctest::Approx(2.0));
  TimedTrace c({Rat(0), Rat(2)}, (Eigen::MatrixXd(1, 2) << 0.0, 1.0).finished());
  CHECK_THROWS(trace_distance(a, c, Metric::identity(1)));
}
