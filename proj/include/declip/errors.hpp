#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace declip {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidSizeError : public Error {
public:
  using Error::Error;
};

class DisconnectedGraphError : public Error {
public:
  using Error::Error;
};

class NotCompleteError : public Error {
public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
public:
  using Error::Error;
};

class NumericalFailureError : public Error {
public:
  using Error::Error;
};

class MalformedLineError : public Error {
public:
  MalformedLineError(std::int64_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line_no(line_no) {}
  std::int64_t line_no;
};

class EmptyDatasetError : public Error {
public:
  using Error::Error;
};

class TooManyAgentsError : public Error {
public:
  using Error::Error;
};

class OverflowError : public Error {
public:
  using Error::Error;
};

class NoConvergenceError : public Error {
public:
  explicit NoConvergenceError(std::int64_t iterations)
      : Error("no convergence after " + std::to_string(iterations) + " iterations"),
        iterations(iterations) {}
  std::int64_t iterations;
};

class BudgetExceededError : public Error {
public:
  using Error::Error;
};

class DegenerateInputError : public Error {
public:
  using Error::Error;
};

class NonPositiveL0Error : public Error {
public:
  using Error::Error;
};

class InvalidStatsError : public Error {
public:
  using Error::Error;
};

class InvalidRuleError : public Error {
public:
  using Error::Error;
};

class NonFiniteIterateError : public Error {
public:
  NonFiniteIterateError(std::int64_t k, int agent)
      : Error("non-finite iterate at k=" + std::to_string(k) + " agent " + std::to_string(agent)),
        k(k), agent(agent) {}
  std::int64_t k;
  int agent;
};

class NotConvexError : public Error {
public:
  using Error::Error;
};

class MissingOptimumError : public Error {
public:
  using Error::Error;
};

class WrongRuleError : public Error {
public:
  using Error::Error;
};

class InsufficientEnsembleError : public Error {
public:
  using Error::Error;
};

class TooFewSamplesError : public Error {
public:
  using Error::Error;
};

class NotApplicableError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace declip
