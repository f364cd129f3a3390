#pragma once

#include <stdexcept>
#include <string>

namespace wqmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Sequence index does not fit in the generating-matrix precision.
class IndexOverflowError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (direction-number tables, JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Mixture whose weights carry no mass.
class DegenerateMixtureError : public Error {
 public:
  using Error::Error;
};

/// A density integrates to zero where a positive mass is required.
class DegenerateDensityError : public Error {
 public:
  using Error::Error;
};

/// A density evaluation returned a negative or non-finite value.
class InvalidDensityError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gaussian-mixture fitting failed.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown (ODE blow-up, node budget, degenerate quadrature).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace wqmc
