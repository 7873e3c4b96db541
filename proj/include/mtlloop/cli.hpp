#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mtlloop::cli {

/// Exit codes shared by all subcommands: 0 success/satisfied/verified,
/// 1 violated/falsified, 2 error.
struct ParseOptions {
  std::string formula;
  std::string pmap;
};

struct MonitorOptions {
  std::string formula;
  std::string trace;
  std::string pmap;
  bool robust = false;
  std::size_t at = 0;
};

struct InferOptions {
  std::string scenario;
  std::string demos;
  double epsilon = 0.0;
  std::optional<std::string> tradeoff;
  std::optional<std::string> out;  // default: next to the scenario file
};

struct SimulateOptions {
  std::string scenario;
  std::string classifier;
  std::string env;
  std::string x0;  // comma-separated values
  std::optional<std::string> out;  // default: current directory
};

struct VerifyOptions {
  std::string scenario;
  std::string classifier;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double radius_scale = 1.0;
  std::optional<std::string> out;  // default: next to the classifier file
};

int run_parse(const ParseOptions& opt);
int run_monitor(const MonitorOptions& opt);
int run_infer(const InferOptions& opt);
int run_simulate(const SimulateOptions& opt);
int run_verify(const VerifyOptions& opt);

/// Full argv entry point (subcommand dispatch included).
int main(int argc, char** argv);

}  // namespace mtlloop::cli
