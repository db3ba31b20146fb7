#pragma once

#include <stdexcept>
#include <string>

namespace dynamo {

/// Input rejected before any computation: bad parameters, malformed
/// configuration, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced non-finite values or could not be completed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dynamo
