#pragma once

#include <stdexcept>
#include <string>

namespace sparsemob {

// Invalid configuration or argument (bad exponent, negative threshold, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates an invariant (duplicate timestamps, mismatched tables).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric whose definition needs more data than was supplied.
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The exact oracle refuses trajectories above its configured size limit.
class OracleSizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace sparsemob
