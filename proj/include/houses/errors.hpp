#pragma once

#include <stdexcept>
#include <string>

namespace houses {

// Invalid arguments: dimension mismatches, empty inputs, bad counts.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A raw parameter value outside its declared bounds.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A value outside the mathematical domain of a function (u not in [0,1], sigma < 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Training data the surrogate cannot use (non-finite targets, too few records).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Covariance factorization failed even at the largest jitter.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run-log or wire-format content that cannot be parsed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace houses
