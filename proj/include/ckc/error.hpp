#pragma once

#include <stdexcept>
#include <string>

namespace ckc {

/// Malformed input: dimension mismatch, id out of range, bad parameter.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two points that must share a cluster are also required to be apart.
class ConstraintConflict : public InputError {
 public:
  using InputError::InputError;
};

/// Exhaustive routine refused an instance larger than its guard.
class GuardError : public InputError {
 public:
  using InputError::InputError;
};

/// No clustering with at most k centers satisfies the constraints.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant broke. Always a bug.
class DefectError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ckc
