#pragma once

#include <stdexcept>
#include <string>

namespace popsim {

/// Precondition violation by the caller (bad index, bad size, malformed input).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A protocol definition document failed validation.
class ProtocolLoadError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// An exhaustive analysis would exceed its configured state-space budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The hitting-time system has no solution because the target is not
/// reached with probability one from every transient configuration.
class NonAbsorbingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace popsim
