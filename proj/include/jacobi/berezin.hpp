#pragma once

#include "jacobi/algebra.hpp"
#include "jacobi/geometry.hpp"

/// Coherent-state (Berezin) equations of motion on the Siegel-Jacobi disk and
/// ball, their FC-decoupled form, the symplectic linearizations, and the
/// energy / Berry phase bookkeeping.
///
/// All functions take coefficients in the convention of the coherent-state
/// derivation. `algebra::conjugation_dictionary` maps them to the convention
/// of the Wei-Norman derivation; that mapping is the caller's business.
namespace jacobi::berezin {

using algebra::BallCoefficients;
using algebra::ComplexCoefficients;
using geometry::BargmannIndex;

struct DiskRates {
  Complex dz;
  Complex dw;
};

struct FCRates {
  Complex deta;
  Complex dw;
};

struct BallRates {
  CVector dz;
  CMatrix dW;
};

/// i dz = eps_a + conj(eps_a) w + (eps_0/2 + eps_+ w) z,
/// i dw = eps_- + eps_0 w + eps_+ w^2.
DiskRates rhs_disk(const ComplexCoefficients& c, Complex z, Complex w);
DiskRates rhs_disk(const ComplexCoefficients& c, const geometry::JacobiPoint& p);

/// i deta = eps_a + eps_- conj(eta) + (eps_0/2) eta; dw as in `rhs_disk`.
FCRates rhs_fc(const ComplexCoefficients& c, Complex eta, Complex w);
FCRates rhs_fc(const ComplexCoefficients& c, const geometry::FCPoint& p);

/// dW from i dW = eps_- + sym(W eps0) + W eps_+ W, sym(A) = (A + A^t)/2.
CMatrix riccati_rhs(const BallCoefficients& c, const CMatrix& W);

/// Rates (dz, dW) of the ball equations in the (z, W) chart:
///   i dW = eps_- + sym(W eps0) + W eps_+ W,
///   i dz = eps + W conj(eps) + eps0^t z / 2 + W eps_+ z.
BallRates rhs_ball(const BallCoefficients& c, const CVector& z, const CMatrix& W);
BallRates rhs_ball(const BallCoefficients& c, const geometry::JacobiPoint& p);

/// deta from i deta = eps + eps_- conj(eta) + eps0^t eta / 2.
CVector rhs_fc_ball(const BallCoefficients& c, const CVector& eta);

/// Generic matrix Riccati / linear-drift pair
///   dW = A W + W D + B + W C W,   dz = M + N z,  M = E + W F, N = A + W C.
struct RiccatiSystem {
  CMatrix A, B, C, D;
  CVector E, F;
};

/// The instantiation generated by a linear hermitian Hamiltonian:
/// A = -i eps0^t/2, B = -i eps_-, C = -i eps_+, D = A^t, E = -i eps, F = -i conj(eps).
RiccatiSystem hamiltonian_riccati_system(const BallCoefficients& c);
CMatrix riccati_rhs(const RiccatiSystem& s, const CMatrix& W);
CVector linear_drift_rhs(const RiccatiSystem& s, const CMatrix& W, const CVector& z);

/// J = [[0, 1], [-1, 0]] in 2n x 2n blocks.
RMatrix symplectic_form(int n);

/// h_c = [[-i eps0^t/2, -i eps_-], [i eps_+, i eps0/2]]; (X, Y)' = h_c (X, Y).
CMatrix hc_matrix(const BallCoefficients& c);

struct RealLinearSystem {
  RMatrix h_r;
  RVector F;
};

/// Real form of the eta equation with eta = xi - i zeta, eps = b + i a:
/// (xi, zeta)' = h_r (xi, zeta) + F, h_r = [[n + q, m - p], [m + p, -n + q]], F = (a, b).
RealLinearSystem hr_matrix(const BallCoefficients& c);

/// Homogeneous coordinates W = X Y^{-1}.
struct LinearizationPair {
  CMatrix X;
  CMatrix Y;

  /// Throws SingularityError when Y is numerically singular.
  CMatrix ratio() const;
};

/// Relative singularity threshold for Y (smallest / largest singular value).
inline constexpr Real kLinearizationSingularity = 1e-10;

/// Propagates (X, Y) = (W0, 1) by exp(t h_c) and returns X Y^{-1}. The interval
/// is split into `segments` equal pieces, restarting from (W, 1) after each.
/// Coefficients must be time-independent on the interval.
geometry::BallPoint riccati_by_linearization(const BallCoefficients& c, const geometry::BallPoint& W0, Real t,
                                             int segments = 1);

/// Covariant symbol of the Hamiltonian on the normalized coherent state at
/// (eta, w): H_eta + H_w.
Real energy(const ComplexCoefficients& c, Complex eta, Complex w, const BargmannIndex& k);
Real energy(const ComplexCoefficients& c, const geometry::FCPoint& p, const BargmannIndex& k);

/// Rate of the Berry phase along a path with velocities (deta, dw).
Real berry_phase_rhs(Complex eta, Complex w, Complex deta, Complex dw, const BargmannIndex& k);

/// phi = phi_D + phi_B.
struct PhaseRecord {
  Real phi_D = 0.0;
  Real phi_B = 0.0;
  Real phi = 0.0;
};

/// dphi_D = -energy, dphi_B = Berry rate along the FC flow, dphi = sum.
PhaseRecord phase_rhs(const ComplexCoefficients& c, Complex eta, Complex w, const BargmannIndex& k);
PhaseRecord phase_rhs(const ComplexCoefficients& c, const geometry::FCPoint& p, const BargmannIndex& k);

/// Closed form of -dphi along the flow:
///   k (eps_0 + eps_- conj(w) + eps_+ w) + (eps_- conj(z)^2 + eps_+ z^2)/4
///   + (eps_a conj(z) + conj(eps_a) z)/2,     z = eta - w conj(eta).
Real phase_rate_closed_form(const ComplexCoefficients& c, Complex eta, Complex w, const BargmannIndex& k);

}  // namespace jacobi::berezin
