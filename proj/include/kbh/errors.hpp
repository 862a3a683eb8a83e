#pragma once

#include <stdexcept>
#include <string>

namespace kbh {

// Thrown when a linear-algebra step (factorization, linear solve) breaks
// down at runtime. Precondition violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kbh
