// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace fgforge {

// Base class for every error the library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates a structural constraint (symmetry, trace/divergence
// conditions, positivity, bad grid). Maps to CLI exit code 2. `norm` holds
// the measured size of the violation when one applies (-1 otherwise).
struct ConstraintViolation : Error {
  double norm = -1.0;
  using Error::Error;
  ConstraintViolation(const std::string& msg, double norm_)
      : Error(msg), norm(norm_) {}
};

// A Laurent coefficient that must cancel analytically failed to cancel
// numerically. Carries the offending order and its sup norm.
struct CancellationFailure : Error {
  int order;
  double norm;
  CancellationFailure(int order_, double norm_, const std::string& what_arg)
      : Error(what_arg), order(order_), norm(norm_) {}
};

// The pointwise linear system for an expansion order is singular where it
// must be invertible (anything except the expected order-3 degeneracy).
struct SingularIndicial : Error {
  int order;
  SingularIndicial(int order_, const std::string& what_arg)
      : Error(what_arg), order(order_) {}
};

// A metric (or its leading term) is numerically non-invertible.
struct SingularMetric : Error {
  using Error::Error;
};

// Malformed input file or job description. Maps to CLI exit code 1.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace fgforge
