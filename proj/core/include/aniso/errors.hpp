#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid caller input: bad dimensions, empty sample sets, inconsistent blocks.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (e.g. a non-unit vector).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Floating-point breakdown: step underflow, singular frames, stalled iterations.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A point pair lies (numerically) on the cut locus, so shortest geodesics are not unique.
class CutLocusError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Radius exceeds r_M / (2 max |F(v)v + grad F|).
class RadiusBoundError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Lagrangian fails the holonomy invariance a construction depends on.
class InvarianceError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Parallel displacement hit a focal value: the displaced map lost rank.
class FocalDegenerateError : public NumericError {
 public:
  FocalDegenerateError(const std::string& what, double offset)
      : NumericError(what), offset_(offset) {}
  double offset() const { return offset_; }

 private:
  double offset_;
};

/// The collapse map does not have constant rank below n, so no focal submanifold exists.
class NotFocalError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace aniso
