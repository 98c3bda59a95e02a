#pragma once

#include <stdexcept>
#include <string>

namespace adcflow {

// Error taxonomy shared by all modules. The CLI maps UserInput-ish kinds
// to exit code 1 and everything else to 2.
enum class ErrorKind {
  InvalidSpec,
  ParseError,
  SingularNode,
  CapacityExceeded,
  UnboundParameter,
  DegeneratePolynomial,
  InfeasibleBias,
  InfeasibleNoise,
  UnstableLoop,
  ContractViolation,
  ConfigError,
  CacheError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // true for errors caused by user-provided input (files, flags, configs)
  bool user_error() const {
    switch (kind_) {
      case ErrorKind::ParseError:
      case ErrorKind::ConfigError:
      case ErrorKind::InvalidSpec:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace adcflow
