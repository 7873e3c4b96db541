#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtlloop {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Formula syntax error carrying the offending position in the input text.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)), pos(position) {}
  std::size_t pos;
};

struct DimensionError : Error {
  using Error::Error;
};

}  // namespace mtlloop
