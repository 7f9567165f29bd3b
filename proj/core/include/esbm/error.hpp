#pragma once

#include <stdexcept>
#include <string>

namespace esbm {

/// Bad input: malformed files, out-of-range hyperparameters, inconsistent
/// dimensions. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esbm
