#pragma once

#include <stdexcept>

namespace swlab {

// Argument outside the mathematical domain of a formula (e.g. rho > 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Structural precondition violated (non-regular graph, bad occupancy vector).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Instance too large for an exhaustive routine.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative procedure failed to reach its stopping condition.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swlab
