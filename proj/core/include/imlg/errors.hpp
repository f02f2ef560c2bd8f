#pragma once

#include <stdexcept>
#include <string>

namespace imlg {

/// Base for errors that may point at a line of a text document.
/// `line()` is 0 when the problem is not tied to a single input line.
class LineError : public std::runtime_error {
public:
  LineError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Malformed or inconsistent design / label document.
class DesignError : public LineError {
public:
  using LineError::LineError;
};

/// Malformed graph, checkpoint, prediction or config document.
class FormatError : public LineError {
public:
  using LineError::LineError;
};

}  // namespace imlg
