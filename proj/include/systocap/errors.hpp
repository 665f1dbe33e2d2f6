#pragma once

#include <stdexcept>
#include <string>

namespace systocap {

/// Raised when a norm description is rejected at construction.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller-side contract was violated (e.g. a non-primitive lattice vector).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the open domain of a map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation refused to run because it would exceed a resource guard.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A certificate check observed data contradicting one of its hypotheses.
class CertificateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dim(long expected, long actual, const char* what) {
  if (expected != actual) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                            ", got " + std::to_string(actual));
  }
}

}  // namespace systocap
