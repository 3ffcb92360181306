#pragma once

#include <stdexcept>
#include <string>

namespace dsieve {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the documented range of an operation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A conservative comparison stayed undecidable up to the precision ceiling.
class PrecisionCeiling : public Error {
 public:
  using Error::Error;
};

/// The sieve was asked to run on a schedule whose hypotheses do not hold.
class ConditionViolated : public Error {
 public:
  using Error::Error;
};

/// An inequality that the construction guarantees was observed to fail.
class InternalBoundBreach : public Error {
 public:
  using Error::Error;
};

class SearchExhausted : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsieve
