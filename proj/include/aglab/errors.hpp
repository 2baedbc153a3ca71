#pragma once

#include <stdexcept>
#include <string>

namespace aglab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class AmbiguousProjection : public Error {
 public:
  using Error::Error;
};

class NonFiniteEnergy : public Error {
 public:
  using Error::Error;
};

class LineSearchFailure : public Error {
 public:
  using Error::Error;
};

class NonClosed : public Error {
 public:
  using Error::Error;
};

class BetaOutOfRange : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace aglab
