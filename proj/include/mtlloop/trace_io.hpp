#pragma once

#include <string>
#include <vector>

#include "mtlloop/trace.hpp"

namespace mtlloop {

struct NamedTrace {
  TimedTrace trace;
  std::vector<std::string> columns;
};

/// Trace CSV: header `t,<name1>,...`, one row per sample, `#` comments.
/// Timestamps are kept exact; values are doubles printed with 17 significant
/// digits so a save/load round trip is bitwise lossless.
NamedTrace load_trace(const std::string& path);
void save_trace(const std::string& path, const TimedTrace& trace, const std::vector<std::string>& columns);

/// Serialize to the same CSV format in memory.
std::string trace_to_csv(const TimedTrace& trace, const std::vector<std::string>& columns);

/// Write a file atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace mtlloop
