#pragma once

#include <stdexcept>
#include <string>

namespace sse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure, division guard, bracketing failure, domain error.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sse
