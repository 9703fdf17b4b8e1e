#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jacobi {

using Real = double;
using Complex = std::complex<double>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr Complex I_unit{0.0, 1.0};

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or coefficient set lies outside the domain of an operation
/// (|w| >= 1, non-hermitian coefficients, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A linear system or change of variables became numerically singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock space is too small for the requested state.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; `what()` carries the field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline Real norm2(Complex c) { return std::norm(c); }

}  // namespace jacobi
