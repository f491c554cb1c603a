#pragma once

#include <stdexcept>
#include <string>

namespace pnrecon {

/// Base of every error raised by the library. The CLI maps the subclasses
/// onto exit codes 1 (InvalidArgument), 2 (DataError), 3 (NumericalError).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed or cannot support the requested estimate.
class DataError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnrecon
