#include "mtlloop/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mtlloop {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return fields;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

NamedTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  std::string line;
  std::vector<std::string> columns;
  std::vector<Rat> times;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line;
    while (!stripped.empty() && (stripped.back() == '\r' || stripped.back() == ' ')) stripped.pop_back();
    if (stripped.empty() || stripped[0] == '#') continue;
    auto fields = split_csv(stripped);
    if (!have_header) {
      if (fields.empty() || fields[0] != "t") throw Error(path + ": header must start with 't'");
      columns.assign(fields.begin() + 1, fields.end());
      if (columns.empty()) throw Error(path + ": trace has no value columns");
      have_header = true;
      continue;
    }
    if (fields.size() != columns.size() + 1) {
      throw Error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns.size() + 1) +
                  " fields, got " + std::to_string(fields.size()));
    }
    try {
      times.push_back(Rat::parse(fields[0]));
    } catch (const std::invalid_argument& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(fields[i], &used);
      } catch (const std::exception&) {
        throw Error(path + ":" + std::to_string(lineno) + ": malformed value '" + fields[i] + "'");
      }
      if (used != fields[i].size()) {
        throw Error(path + ":" + std::to_string(lineno) + ": malformed value '" + fields[i] + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(path + ": missing header");
  if (rows.empty()) throw Error(path + ": empty trace");
  Eigen::MatrixXd states(columns.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t i = 0; i < columns.size(); ++i) states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[k][i];
  }
  return NamedTrace{TimedTrace(std::move(times), std::move(states)), std::move(columns)};
}

std::string trace_to_csv(const TimedTrace& trace, const std::vector<std::string>& columns) {
  if (static_cast<int>(columns.size()) != trace.dim()) throw Error("column count does not match trace dimension");
  std::ostringstream out;
  out << "t";
  for (const auto& c : columns) out << "," << c;
  out << "\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << trace.time(k).to_string();
    for (int i = 0; i < trace.dim(); ++i) out << "," << format_double(trace.state(k)(i));
    out << "\n";
  }
  return out.str();
}

void save_trace(const std::string& path, const TimedTrace& trace, const std::vector<std::string>& columns) {
  write_file_atomic(path, trace_to_csv(trace, columns));
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mtlloop
