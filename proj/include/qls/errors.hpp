#pragma once

#include <stdexcept>
#include <string>

namespace qls {

/// Base class for all library-specific failures. Invalid constructor
/// arguments additionally use std::invalid_argument directly.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A frequency grid does not contain the support of a spectral profile
/// (edge amplitude above 1e-8 of the peak amplitude).
class GridTooNarrow : public Error {
 public:
  explicit GridTooNarrow(const std::string& msg) : Error(msg) {}
};

/// A correlator or signal path was asked to handle a probe state it has no
/// closed form for (e.g. two-point correlators of the heralded biphoton,
/// which must route through the four-point correlator instead).
class UnsupportedState : public Error {
 public:
  explicit UnsupportedState(const std::string& msg) : Error(msg) {}
};

/// An enumeration request exceeds the documented combinatorial guards.
class CombinatorialLimitExceeded : public Error {
 public:
  explicit CombinatorialLimitExceeded(const std::string& msg) : Error(msg) {}
};

/// A term references a classical beam index not present in the geometry.
class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

/// Doubling the quadrature grid moved a signal by more than the declared
/// convergence tolerance (raised only when verification is requested).
class QuadratureUnderResolved : public Error {
 public:
  explicit QuadratureUnderResolved(const std::string& msg) : Error(msg) {}
};

/// Config file could not be parsed; message carries line/field diagnostics.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Config parsed but violates a semantic invariant; message names it.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace qls
