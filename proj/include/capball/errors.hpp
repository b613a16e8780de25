#pragma once

#include <stdexcept>
#include <string>

namespace capball {

// Base class for every failure raised by the library. The CLI maps
// ConfigError to the usage exit code and everything else to a runtime failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  explicit UnsupportedDimension(int d)
      : Error("unsupported dimension d=" + std::to_string(d)), dimension(d) {}
  int dimension;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A truncated series could not meet the requested tolerance; carries the
// a-posteriori tail estimate so callers can decide how far to refine.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, double tail_estimate)
      : Error(what + " (tail estimate " + std::to_string(tail_estimate) + ")"),
        tail(tail_estimate) {}
  double tail;
};

}  // namespace capball
