#pragma once

#include <filesystem>
#include <string>

#include "mtlloop/demos.hpp"
#include "mtlloop/scenario.hpp"

// Gate-crossing fixture: a 1-D agent advances one unit per step while a
// scripted gate signal is open, crossing two target bands and an obstacle
// band that is only dangerous while the gate is closed.
namespace fixture {

struct Paths {
  std::filesystem::path root;
  std::filesystem::path scenario;  // scenario.json
  std::filesystem::path demos;     // demos/demo_<i>/
  std::filesystem::path pmap;      // pmap.json for parse/monitor
};

std::string scenario_json();
std::string pmap_json();

/// Write scenario.json, pmap.json and n scripted demonstrations under dir.
Paths write_fixture(const std::filesystem::path& dir, int n_demos = 20);

/// Environment trace whose gate never opens (closed-loop violation case).
void write_closed_env(const std::filesystem::path& csv_path);

/// Fresh temp directory under the system temp root.
std::filesystem::path fresh_dir(const std::string& tag);

}  // namespace fixture
