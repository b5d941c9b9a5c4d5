#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace lsc {

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int line_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PlacementError : std::runtime_error {
  explicit PlacementError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal invariant broken: indicates a bug in this library, not bad input.
struct EngineBug : std::logic_error {
  explicit EngineBug(const std::string& msg) : std::logic_error(msg) {}
};

using Rng = std::mt19937_64;

}  // namespace lsc
