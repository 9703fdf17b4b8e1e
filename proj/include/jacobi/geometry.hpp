#pragma once

#include "jacobi/common.hpp"

/// Charts on the Siegel disk/ball D_n and the Siegel-Jacobi domain C^n x D_n.
namespace jacobi::geometry {

inline constexpr Real kSymmetryTolerance = 1e-12;
inline constexpr Real kPositivityTolerance = 1e-14;

struct Membership {
  bool inside = false;
  Real symmetry_residual = 0.0;
  /// Smallest eigenvalue of 1 - W conj(W); the distance-to-boundary margin.
  Real min_eigenvalue = 0.0;
};

/// Diagnostic membership test for the Siegel ball: W = W^t (to 1e-12) and
/// 1 - W conj(W) positive definite (smallest eigenvalue > 1e-14).
Membership ball_membership(const CMatrix& W);

/// Smallest eigenvalue of 1 - W conj(W) (equals 1 - |w|^2 for n = 1).
Real ball_margin(const CMatrix& W);

/// A point of the Siegel disk, |w| < 1.
class DiskPoint {
 public:
  explicit DiskPoint(Complex w);
  Complex w() const { return w_; }

 private:
  Complex w_;
};

/// A point of the Siegel ball. Validated on construction.
class BallPoint {
 public:
  explicit BallPoint(CMatrix W);
  static BallPoint origin(int n) { return BallPoint(CMatrix::Zero(n, n)); }
  static BallPoint disk(Complex w);

  int n() const { return static_cast<int>(W_.rows()); }
  const CMatrix& W() const { return W_; }
  Real margin() const { return margin_; }

 private:
  CMatrix W_;
  Real margin_;
};

/// (z, W) chart of C^n x D_n.
struct JacobiPoint {
  CVector z;
  BallPoint W;
};

/// (eta, W) chart in which the Kahler form splits.
struct FCPoint {
  CVector eta;
  BallPoint W;
};

/// Bargmann index k of the positive discrete series. Any k > 0 is accepted;
/// `discrete_series()` reports whether 2k is an integer >= 2.
class BargmannIndex {
 public:
  explicit BargmannIndex(Real k);
  Real value() const { return k_; }
  bool discrete_series() const;

 private:
  Real k_;
};

/// z = eta - W conj(eta).
JacobiPoint fc_forward(const FCPoint& p);
/// eta = (1 - W conj(W))^{-1} (z + W conj(z)).
FCPoint fc_inverse(const JacobiPoint& p);

CVector fc_forward(const CVector& eta, const CMatrix& W);
CVector fc_inverse(const CVector& z, const CMatrix& W);
inline Complex fc_forward(Complex eta, Complex w) { return eta - w * std::conj(eta); }
Complex fc_inverse(Complex z, Complex w);

struct DiskParam {
  Complex w;
  Real rho;
};

/// w = (zc/|zc|) tanh|zc|, rho = ln(1 - |w|^2); (0, 0) at zc = 0.
DiskParam disk_param(Complex zc);

/// 2F = (2|z|^2 + z^2 conj(w) + conj(z)^2 w) / (1 - |w|^2).
Real overlap_exponent(Complex z, Complex w);
/// 2F in the FC chart: 2|eta|^2 - conj(w) eta^2 - w conj(eta)^2.
Real overlap_exponent_fc(Complex eta, Complex w);

/// ln <e_{z,w}, e_{z,w}> = -2k ln(1 - |w|^2) + F.
Real overlap_log(Complex z, Complex w, const BargmannIndex& k);
Real overlap_log(const JacobiPoint& p, const BargmannIndex& k);

/// Kahler metric g_{ab} = d^2/(d zeta_a d conj(zeta_b)) ln <e, e>, zeta = (z, w),
/// by central finite differences of `overlap_log` with Wirtinger derivatives.
Eigen::Matrix2cd kahler_metric(Complex z, Complex w, const BargmannIndex& k, Real h = 1e-5);
Eigen::Matrix2cd kahler_metric(const JacobiPoint& p, const BargmannIndex& k, Real h = 1e-5);

}  // namespace jacobi::geometry
