#pragma once

#include <stdexcept>
#include <string>

namespace swexp {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data (source spec, CSV, ...) violates a declared invariant.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ZeroMarginal : public DomainError {
 public:
  using DomainError::DomainError;
};

class InfeasibleRate : public DomainError {
 public:
  using DomainError::DomainError;
};

// Requested computation exceeds an enumeration cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exponent fit impossible because some observed rate is zero. Carries the
// one-sided bound that the data still supports.
class DegenerateData : public std::runtime_error {
 public:
  DegenerateData(const std::string& what, double exponent_lower_bound)
      : std::runtime_error(what), exponent_lower_bound_(exponent_lower_bound) {}

  double exponent_lower_bound() const noexcept { return exponent_lower_bound_; }

 private:
  double exponent_lower_bound_;
};

}  // namespace swexp
