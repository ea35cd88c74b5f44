#pragma once

#include <stdexcept>
#include <string>

namespace hyperbc {

/// Thrown when a caller violates a documented precondition (bad shape,
/// p below the admissible range, non-finite input, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine detects a state that valid inputs can
/// never produce (singular value below 1, eigenvalue of I + w~ outside the
/// right half-plane, a hypergeometric series that refuses to converge).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace hyperbc
