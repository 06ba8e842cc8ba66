#pragma once

#include <stdexcept>
#include <string>

namespace ctd {

// Invalid arguments (negative probabilities, degenerate boxes, bad config values)
// are reported with std::domain_error. The types below cover the rest.

/// Raised when a linear-algebra step cannot proceed (singular or badly
/// conditioned innovation covariance).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ctd
