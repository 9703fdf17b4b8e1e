#include "jacobi/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace jacobi::geometry {

namespace {

void require_disk(Complex w, const char* where) {
  if (!(std::norm(w) < 1.0)) {
    std::ostringstream msg;
    msg << where << ": |w| = " << std::abs(w) << " is not inside the unit disk";
    throw DomainError(msg.str());
  }
}

}  // namespace

Real ball_margin(const CMatrix& W) {
  const auto n = W.rows();
  CMatrix G = CMatrix::Identity(n, n) - W * W.conjugate();
  // Hermitian for symmetric W; symmetrize away rounding.
  G = 0.5 * (G + G.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Membership ball_membership(const CMatrix& W) {
  Membership m;
  if (W.rows() != W.cols() || W.rows() == 0 || !W.allFinite()) return m;
  m.symmetry_residual = (W - W.transpose()).cwiseAbs().maxCoeff();
  m.min_eigenvalue = ball_margin(W);
  m.inside = m.symmetry_residual <= kSymmetryTolerance && m.min_eigenvalue > kPositivityTolerance;
  return m;
}

DiskPoint::DiskPoint(Complex w) : w_(w) { require_disk(w, "DiskPoint"); }

BallPoint::BallPoint(CMatrix W) : W_(std::move(W)) {
  const Membership m = ball_membership(W_);
  if (!m.inside) {
    std::ostringstream msg;
    msg << "BallPoint: not in the Siegel ball (symmetry residual " << m.symmetry_residual
        << ", smallest eigenvalue of 1 - W conj(W) " << m.min_eigenvalue << ")";
    throw DomainError(msg.str());
  }
  margin_ = m.min_eigenvalue;
}

BallPoint BallPoint::disk(Complex w) {
  CMatrix W(1, 1);
  W << w;
  return BallPoint(W);
}

BargmannIndex::BargmannIndex(Real k) : k_(k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("BargmannIndex: k must be positive");
}

bool BargmannIndex::discrete_series() const {
  const Real twice = 2.0 * k_;
  return twice >= 2.0 && std::abs(twice - std::round(twice)) < 1e-12;
}

CVector fc_forward(const CVector& eta, const CMatrix& W) { return eta - W * eta.conjugate(); }

CVector fc_inverse(const CVector& z, const CMatrix& W) {
  const auto n = W.rows();
  const CMatrix G = CMatrix::Identity(n, n) - W * W.conjugate();
  return G.partialPivLu().solve(z + W * z.conjugate());
}

Complex fc_inverse(Complex z, Complex w) {
  require_disk(w, "fc_inverse");
  return (z + w * std::conj(z)) / (1.0 - std::norm(w));
}

JacobiPoint fc_forward(const FCPoint& p) { return {fc_forward(p.eta, p.W.W()), p.W}; }

FCPoint fc_inverse(const JacobiPoint& p) { return {fc_inverse(p.z, p.W.W()), p.W}; }

DiskParam disk_param(Complex zc) {
  const Real r = std::abs(zc);
  if (r == 0.0) return {Complex{0.0, 0.0}, 0.0};
  // tanh r rounds to 1 beyond r ~ 19; keep the largest modulus still inside.
  constexpr Real kBelowOne = 1.0 - std::numeric_limits<Real>::epsilon() / 2;
  Complex w = std::polar(std::min(std::tanh(r), kBelowOne), std::arg(zc));
  while (!(std::norm(w) < 1.0)) w *= kBelowOne;
  // ln(1 - tanh^2 r) = -2 ln cosh r = -2 (r + log1p(e^{-2r}) - ln 2), overflow-free.
  return {w, -2.0 * (r + std::log1p(std::exp(-2.0 * r)) - std::log(2.0))};
}

Real overlap_exponent(Complex z, Complex w) {
  require_disk(w, "overlap_exponent");
  const Complex num = 2.0 * std::norm(z) + z * z * std::conj(w) + std::conj(z) * std::conj(z) * w;
  return num.real() / (1.0 - std::norm(w));
}

Real overlap_exponent_fc(Complex eta, Complex w) {
  const Complex v = 2.0 * std::norm(eta) - std::conj(w) * eta * eta - w * std::conj(eta) * std::conj(eta);
  return v.real();
}

Real overlap_log(Complex z, Complex w, const BargmannIndex& k) {
  require_disk(w, "overlap_log");
  return -2.0 * k.value() * std::log1p(-std::norm(w)) + 0.5 * overlap_exponent(z, w);
}

Real overlap_log(const JacobiPoint& p, const BargmannIndex& k) {
  if (p.W.n() != 1 || p.z.size() != 1) throw DomainError("overlap_log: only defined for n = 1");
  return overlap_log(p.z[0], p.W.W()(0, 0), k);
}

Eigen::Matrix2cd kahler_metric(Complex z, Complex w, const BargmannIndex& k, Real h) {
  require_disk(w, "kahler_metric");
  if (std::abs(w) + 2.0 * h >= 1.0) throw DomainError("kahler_metric: stencil leaves the disk");

  // Real coordinates (x_z, y_z, x_w, y_w).
  const Eigen::Vector4d base(z.real(), z.imag(), w.real(), w.imag());
  auto f = [&](const Eigen::Vector4d& q) {
    return overlap_log(Complex{q[0], q[1]}, Complex{q[2], q[3]}, k);
  };

  Eigen::Matrix4d hess;
  const Real f0 = f(base);
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e[i] = h;
    hess(i, i) = (f(base + e) - 2.0 * f0 + f(base - e)) / (h * h);
    for (int j = i + 1; j < 4; ++j) {
      Eigen::Vector4d d = Eigen::Vector4d::Zero();
      d[j] = h;
      const Real v = (f(base + e + d) - f(base + e - d) - f(base - e + d) + f(base - e - d)) / (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }

  // d/dzeta d/dconj(zeta') = (1/4)(dx - i dy)(dx' + i dy').
  Eigen::Matrix2cd g;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int xa = 2 * a, ya = 2 * a + 1, xb = 2 * b, yb = 2 * b + 1;
      g(a, b) = 0.25 * Complex{hess(xa, xb) + hess(ya, yb), hess(xa, yb) - hess(ya, xb)};
    }
  }
  return g;
}

Eigen::Matrix2cd kahler_metric(const JacobiPoint& p, const BargmannIndex& k, Real h) {
  if (p.W.n() != 1 || p.z.size() != 1) throw DomainError("kahler_metric: only defined for n = 1");
  return kahler_metric(p.z[0], p.W.W()(0, 0), k, h);
}

}  // namespace jacobi::geometry
