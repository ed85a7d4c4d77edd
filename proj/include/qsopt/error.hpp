#pragma once

#include <stdexcept>
#include <string>

namespace qsopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A circuit or gate violates a structural invariant, or an edit is out of range.
class CircuitError : public Error {
 public:
  using Error::Error;
};

/// Malformed circuit text. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A simulation request the backend cannot honor (qubit cap, bad index, ...).
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Configuration invariant violated; detected before any computation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Metric undefined for its input (e.g. QFI of a circuit without parameters).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Environment misuse: step before reset, unknown action id, oversized initial circuit.
class EnvError : public Error {
 public:
  using Error::Error;
};

/// Learning-stack failure such as a non-finite loss.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsopt
