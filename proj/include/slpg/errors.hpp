#pragma once

#include <stdexcept>
#include <string>

namespace slpg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible (non-square input, row/column mismatch).
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range (for example eta <= 0).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Matrix is (numerically) rank deficient where full column rank is required.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// The requested operation is not available for this regularizer.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// A matrix argument contains NaN or Inf.
class NonFiniteError : public Error {
public:
  using Error::Error;
};

} // namespace slpg
