#pragma once

#include <stdexcept>
#include <string>

namespace ripcert {

// Invalid arguments, malformed instances, unusable certificates. CLI exit code 2.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed text input; carries the 1-based line where parsing stopped.
struct parse_error : input_error {
  parse_error(const std::string& what, long line)
      : input_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};

// Mathematically impossible request (e.g. more clauses than variables,
// empty bracketing interval, operator norm out of range).
struct construction_error : input_error {
  explicit construction_error(const std::string& what) : input_error(what) {}
};

// Work exceeds an explicit guardrail (enumeration budget, max-n). CLI exit code 3.
struct capacity_error : std::runtime_error {
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ripcert
