#pragma once

#include <stdexcept>
#include <string>

namespace smile {

/// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A regime-conditional formula was invoked outside its declared regime.
struct RegimeMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested accuracy could not be reached; carries the achieved bound.
struct AccuracyError : std::runtime_error {
  double achieved_bound;
  AccuracyError(const std::string& msg, double achieved)
      : std::runtime_error(msg), achieved_bound(achieved) {}
};

/// Case split of a published formula does not cover the given input.
struct BoundaryCaseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace smile
