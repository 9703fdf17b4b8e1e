#pragma once

// Random inputs shared by the unit tests and the acceptance binary.

#include <numbers>
#include <random>

#include "jacobi/algebra.hpp"

namespace jacobi::testing {

inline algebra::ComplexCoefficients random_coeffs(std::mt19937_64& rng, Real scale = 1.0) {
  std::uniform_real_distribution<Real> u(-scale, scale);
  return {Complex{u(rng), u(rng)}, u(rng), Complex{u(rng), u(rng)}};
}

inline CVector random_vector(std::mt19937_64& rng, int n, Real scale = 1.0) {
  std::uniform_real_distribution<Real> u(-scale, scale);
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = {u(rng), u(rng)};
  return v;
}

inline CMatrix random_symmetric(std::mt19937_64& rng, int n, Real scale = 1.0) {
  std::uniform_real_distribution<Real> u(-scale, scale);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
  return 0.5 * (a + a.transpose());
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int n, Real scale = 1.0) {
  std::uniform_real_distribution<Real> u(-scale, scale);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
  return 0.5 * (a + a.adjoint());
}

/// Symmetric W with operator norm exactly r.
inline CMatrix random_ball_point(std::mt19937_64& rng, int n, Real r) {
  const CMatrix s = random_symmetric(rng, n);
  return s * (r / Eigen::JacobiSVD<CMatrix>(s).singularValues()(0));
}

/// w uniform in the disk of radius r.
inline Complex random_disk_point(std::mt19937_64& rng, Real r) {
  std::uniform_real_distribution<Real> u(0.0, 1.0);
  return std::polar(r * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

inline algebra::BallCoefficients random_ball_coeffs(std::mt19937_64& rng, int n, Real scale = 1.0) {
  return {random_vector(rng, n, scale), random_hermitian(rng, n, scale), random_symmetric(rng, n, scale)};
}

}  // namespace jacobi::testing
