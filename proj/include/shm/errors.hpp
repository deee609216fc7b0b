#pragma once

#include <stdexcept>
#include <string>

namespace shm {

/// Raised when operand shapes are empty or incompatible.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an input violates a documented precondition (Hermiticity,
/// positivity of masses, projection identities, ...).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace shm
