#include "jacobi/berezin.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace jacobi::berezin {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_disk(Complex w, const char* where) {
  if (!(std::norm(w) < 1.0)) {
    std::ostringstream msg;
    msg << where << ": |w| = " << std::abs(w) << " is not inside the unit disk";
    throw DomainError(msg.str());
  }
}

void require_n1(const geometry::BallPoint& W, Eigen::Index vector_size, const char* where) {
  if (W.n() != 1 || vector_size != 1) throw DomainError(std::string(where) + ": requires n = 1");
}

void require_dim(const BallCoefficients& c, Eigen::Index n, const char* where) {
  if (c.n() != n) {
    std::ostringstream msg;
    msg << where << ": coefficient dimension " << c.n() << " does not match state dimension " << n;
    throw DomainError(msg.str());
  }
}

}  // namespace

DiskRates rhs_disk(const ComplexCoefficients& c, Complex z, Complex w) {
  const Complex idz = c.eps_a + std::conj(c.eps_a) * w + (0.5 * c.eps_0 + c.eps_plus * w) * z;
  const Complex idw = c.eps_minus() + c.eps_0 * w + c.eps_plus * w * w;
  return {-kI * idz, -kI * idw};
}

DiskRates rhs_disk(const ComplexCoefficients& c, const geometry::JacobiPoint& p) {
  require_n1(p.W, p.z.size(), "rhs_disk");
  return rhs_disk(c, p.z[0], p.W.W()(0, 0));
}

FCRates rhs_fc(const ComplexCoefficients& c, Complex eta, Complex w) {
  const Complex ideta = c.eps_a + c.eps_minus() * std::conj(eta) + 0.5 * c.eps_0 * eta;
  const Complex idw = c.eps_minus() + c.eps_0 * w + c.eps_plus * w * w;
  return {-kI * ideta, -kI * idw};
}

FCRates rhs_fc(const ComplexCoefficients& c, const geometry::FCPoint& p) {
  require_n1(p.W, p.eta.size(), "rhs_fc");
  return rhs_fc(c, p.eta[0], p.W.W()(0, 0));
}

CMatrix riccati_rhs(const BallCoefficients& c, const CMatrix& W) {
  require_dim(c, W.rows(), "riccati_rhs");
  const CMatrix We0 = W * c.eps0();
  const CMatrix idW = c.eps_minus() + 0.5 * (We0 + We0.transpose()) + W * c.eps_plus() * W;
  return -kI * idW;
}

BallRates rhs_ball(const BallCoefficients& c, const CVector& z, const CMatrix& W) {
  require_dim(c, z.size(), "rhs_ball");
  const CVector idz = c.eps() + W * c.eps().conjugate() + 0.5 * c.eps0().transpose() * z + W * c.eps_plus() * z;
  return {-kI * idz, riccati_rhs(c, W)};
}

BallRates rhs_ball(const BallCoefficients& c, const geometry::JacobiPoint& p) {
  return rhs_ball(c, p.z, p.W.W());
}

CVector rhs_fc_ball(const BallCoefficients& c, const CVector& eta) {
  require_dim(c, eta.size(), "rhs_fc_ball");
  const CVector ideta = c.eps() + c.eps_minus() * eta.conjugate() + 0.5 * c.eps0().transpose() * eta;
  return -kI * ideta;
}

RiccatiSystem hamiltonian_riccati_system(const BallCoefficients& c) {
  RiccatiSystem s;
  s.A = -0.5 * kI * c.eps0().transpose();
  s.B = -kI * c.eps_minus();
  s.C = -kI * c.eps_plus();
  s.D = s.A.transpose();
  s.E = -kI * c.eps();
  s.F = -kI * c.eps().conjugate();
  return s;
}

CMatrix riccati_rhs(const RiccatiSystem& s, const CMatrix& W) { return s.A * W + W * s.D + s.B + W * s.C * W; }

CVector linear_drift_rhs(const RiccatiSystem& s, const CMatrix& W, const CVector& z) {
  const CVector M = s.E + W * s.F;
  const CMatrix N = s.A + W * s.C;
  return M + N * z;
}

RMatrix symplectic_form(int n) {
  RMatrix J = RMatrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -RMatrix::Identity(n, n);
  return J;
}

CMatrix hc_matrix(const BallCoefficients& c) {
  const int n = c.n();
  CMatrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = -0.5 * kI * c.eps0().transpose();
  h.topRightCorner(n, n) = -kI * c.eps_minus();
  h.bottomLeftCorner(n, n) = kI * c.eps_plus();
  h.bottomRightCorner(n, n) = 0.5 * kI * c.eps0();
  return h;
}

RealLinearSystem hr_matrix(const BallCoefficients& c) {
  const int n = c.n();
  const auto d = algebra::ball_real_decomposition(c);
  RealLinearSystem out;
  out.h_r.resize(2 * n, 2 * n);
  out.h_r.topLeftCorner(n, n) = d.n + d.q;
  out.h_r.topRightCorner(n, n) = d.m - d.p;
  out.h_r.bottomLeftCorner(n, n) = d.m + d.p;
  out.h_r.bottomRightCorner(n, n) = -d.n + d.q;
  // eps = b + i a
  out.F.resize(2 * n);
  out.F.head(n) = c.eps().imag();
  out.F.tail(n) = c.eps().real();
  return out;
}

CMatrix LinearizationPair::ratio() const {
  Eigen::JacobiSVD<CMatrix> svd(Y);
  const auto& s = svd.singularValues();
  const Real largest = s.maxCoeff();
  const Real smallest = s.minCoeff();
  if (!(largest > 0.0) || smallest < kLinearizationSingularity * largest) {
    std::ostringstream msg;
    msg << "riccati linearization: Y is near-singular (singular value ratio " << smallest / largest
        << "); subdivide the time interval";
    throw SingularityError(msg.str());
  }
  // W = X Y^{-1}  <=>  Y^t W^t = X^t
  return Y.transpose().partialPivLu().solve(X.transpose()).transpose();
}

geometry::BallPoint riccati_by_linearization(const BallCoefficients& c, const geometry::BallPoint& W0, Real t,
                                             int segments) {
  require_dim(c, W0.n(), "riccati_by_linearization");
  if (segments < 1) throw DomainError("riccati_by_linearization: segments must be >= 1");
  if (t == 0.0) return W0;
  const int n = c.n();
  const CMatrix h = hc_matrix(c);
  const CMatrix g = (h * (t / segments)).exp();
  CMatrix W = W0.W();
  for (int s = 0; s < segments; ++s) {
    LinearizationPair pair;
    pair.X = g.topLeftCorner(n, n) * W + g.topRightCorner(n, n);
    pair.Y = g.bottomLeftCorner(n, n) * W + g.bottomRightCorner(n, n);
    W = pair.ratio();
  }
  return geometry::BallPoint(W);
}

Real energy(const ComplexCoefficients& c, Complex eta, Complex w, const BargmannIndex& k) {
  require_disk(w, "energy");
  const Complex em = c.eps_minus();
  const Complex h_eta = std::conj(c.eps_a) * eta + c.eps_a * std::conj(eta) +
                        0.5 * (c.eps_plus * eta * eta + em * std::conj(eta) * std::conj(eta) +
                               c.eps_0 * std::norm(eta));
  const Real kk = k.value();
  const Complex h_w =
      kk * c.eps_0 + 2.0 * kk / (1.0 - std::norm(w)) * (c.eps_plus * w + em * std::conj(w) + c.eps_0 * std::norm(w));
  return (h_eta + h_w).real();
}

Real energy(const ComplexCoefficients& c, const geometry::FCPoint& p, const BargmannIndex& k) {
  require_n1(p.W, p.eta.size(), "energy");
  return energy(c, p.eta[0], p.W.W()(0, 0), k);
}

Real berry_phase_rhs(Complex eta, Complex w, Complex deta, Complex dw, const BargmannIndex& k) {
  require_disk(w, "berry_phase_rhs");
  const Complex ceta = std::conj(eta);
  const Complex x = (2.0 * k.value() * std::conj(w) / (1.0 - std::norm(w)) - 0.5 * ceta * ceta) * dw +
                    (ceta + std::conj(w) * eta) * deta;
  // (i/2)(x - conj(x)) = -Im x
  return -x.imag();
}

PhaseRecord phase_rhs(const ComplexCoefficients& c, Complex eta, Complex w, const BargmannIndex& k) {
  const FCRates r = rhs_fc(c, eta, w);
  PhaseRecord p;
  p.phi_D = -energy(c, eta, w, k);
  p.phi_B = berry_phase_rhs(eta, w, r.deta, r.dw, k);
  p.phi = p.phi_D + p.phi_B;
  return p;
}

PhaseRecord phase_rhs(const ComplexCoefficients& c, const geometry::FCPoint& p, const BargmannIndex& k) {
  require_n1(p.W, p.eta.size(), "phase_rhs");
  return phase_rhs(c, p.eta[0], p.W.W()(0, 0), k);
}

Real phase_rate_closed_form(const ComplexCoefficients& c, Complex eta, Complex w, const BargmannIndex& k) {
  const Complex z = geometry::fc_forward(eta, w);
  const Complex em = c.eps_minus();
  const Complex rate1 = c.eps_0 + em * std::conj(w) + c.eps_plus * w;
  const Complex rate0 = 0.25 * (em * std::conj(z) * std::conj(z) + c.eps_plus * z * z) +
                        0.5 * (c.eps_a * std::conj(z) + std::conj(c.eps_a) * z);
  return (k.value() * rate1 + rate0).real();
}

}  // namespace jacobi::berezin
