#pragma once

#include <stdexcept>
#include <string>

namespace ddq {

/// Input violates an operation's contract (bad shapes, out-of-range values).
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read, written or parsed. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddq
