#include "fixture.hpp"

#include <fstream>
#include <unistd.h>

#include "mtlloop/plant.hpp"
#include "mtlloop/rng.hpp"
#include "mtlloop/trace_io.hpp"

namespace fixture {

using namespace mtlloop;

std::string scenario_json() {
  return R"({
  "plant": {
    "A": [[1.0]],
    "B": [[1.0]],
    "inputs": [[0.0], [1.0]],
    "period": "1",
    "horizon": 40
  },
  "metrics": {
    "state": [[1.0]],
    "env": [[1.0]],
    "feature": [[1.0]],
    "q": [[1.0, 0.0], [0.0, 1.0]]
  },
  "predicates": {
    "r1": {"type": "box", "lower": [4.6, "-inf"], "upper": [5.4, "inf"]},
    "r2": {"type": "box", "lower": [9.6, "-inf"], "upper": [10.4, "inf"]},
    "obs": {"type": "box", "lower": [2.5, "-inf"], "upper": [3.5, 1.0]}
  },
  "spec": "F[0,10)(r1 & F[0,15) r2) & G[0,40) !obs",
  "feature_maps": {
    "h": {"C": [[1.0]], "d": [0.0], "lipschitz": 1.0},
    "qhat": {"C": [[1.0, 0.0], [0.0, 1.0]], "d": [0.0, 0.0], "lx": 1.0, "lh": 1.0}
  },
  "history_depth": 2,
  "inference": {
    "windows": [["0", "1"], ["0", "2"], ["1", "2"]],
    "max_depth": 2,
    "epsilon": 0.1,
    "tradeoff": "equal"
  }
}
)";
}

std::string pmap_json() {
  return R"({
  "dim": 2,
  "predicates": {
    "r1": {"type": "box", "lower": [4.6, "-inf"], "upper": [5.4, "inf"]},
    "r2": {"type": "box", "lower": [9.6, "-inf"], "upper": [10.4, "inf"]},
    "obs": {"type": "box", "lower": [2.5, "-inf"], "upper": [3.5, 1.0]}
  }
}
)";
}

namespace {

// Gate signal: closed (jittered around 0.5) before open_time, open
// (jittered around 2.0) afterwards and forever.
std::vector<double> gate_values(int open_time, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values;
  for (int t = -2; t <= 40; ++t) {
    values.push_back(t < open_time ? rng.uniform(0.2, 0.8) : rng.uniform(1.8, 2.2));
  }
  return values;
}

void write_env_csv(const std::filesystem::path& path, const std::vector<double>& gate) {
  std::string out = "t,g\n";
  int t = -2;
  for (double g : gate) {
    out += std::to_string(t) + "," + format_double(g) + "\n";
    ++t;
  }
  write_file_atomic(path.string(), out);
}

}  // namespace

Paths write_fixture(const std::filesystem::path& dir, int n_demos) {
  namespace fs = std::filesystem;
  Paths paths;
  paths.root = dir;
  paths.scenario = dir / "scenario.json";
  paths.demos = dir / "demos";
  paths.pmap = dir / "pmap.json";
  fs::create_directories(paths.demos);
  write_file_atomic(paths.scenario.string(), scenario_json());
  write_file_atomic(paths.pmap.string(), pmap_json());

  LinearSystem sys(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1),
                   {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  const int horizon = 40;

  for (int i = 0; i < n_demos; ++i) {
    fs::path demo_dir = paths.demos / ("demo_" + std::to_string(i));
    fs::create_directories(demo_dir);
    int open_time = i % 5;
    std::vector<double> gate = gate_values(open_time, 1000 + static_cast<std::uint64_t>(i));
    write_env_csv(demo_dir / "env.csv", gate);

    // Scripted policy: advance exactly while the gate is open.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    std::string agent = "t,px\n0," + format_double(x(0)) + "\n";
    std::string input = "t,u\n";
    for (int k = 0; k < horizon; ++k) {
      double g = gate[static_cast<std::size_t>(k + 2)];  // env history offset
      const Eigen::VectorXd& u = g >= 1.0 ? sys.inputs[1] : sys.inputs[0];
      input += std::to_string(k) + "," + format_double(u(0)) + "\n";
      x = sys.step(x, u);
      agent += std::to_string(k + 1) + "," + format_double(x(0)) + "\n";
    }
    write_file_atomic((demo_dir / "agent.csv").string(), agent);
    write_file_atomic((demo_dir / "input.csv").string(), input);
  }
  return paths;
}

void write_closed_env(const std::filesystem::path& csv_path) {
  write_env_csv(csv_path, gate_values(41, 77));  // never opens inside the horizon
}

std::filesystem::path fresh_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  auto path = std::filesystem::temp_directory_path() /
              ("mtlloop_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path;
}

}  // namespace fixture
