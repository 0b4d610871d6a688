#pragma once

#include <stdexcept>

namespace qfikit {

// Contract violations on inputs: bad dimensions, non-Hermitian data,
// out-of-range knobs, malformed scenarios. The CLI maps these to exit code 2.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerically ill-posed requests on otherwise well-formed inputs:
// rank-deficient logarithm, divergent series, pure-mode generator form,
// unphysical covariance. The CLI maps these to exit code 3.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace qfikit
