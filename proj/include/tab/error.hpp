#pragma once

#include <stdexcept>
#include <string>

namespace tab {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument violates a documented invariant.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Matrix/vector shapes do not line up.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Reading or writing experiment files failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tab
