#pragma once

#include <stdexcept>
#include <string>

namespace tivstat {

// Base of all library errors. Each subclass maps onto one failure category
// that callers (the CLI in particular) treat differently.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed (rank deficiency, non-convergence, lost pairing).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or too small for the requested statistic.
class DataError : public Error {
 public:
  using Error::Error;
};

// An operation produced an output that violates its own invariants.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tivstat
