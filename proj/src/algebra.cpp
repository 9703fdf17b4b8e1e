#include "jacobi/algebra.hpp"

#include <cmath>
#include <string>

namespace jacobi::algebra {

namespace {

using G = Generator;

// Structure constants: c[i][j] = coefficients of [X_i, X_j].
std::array<std::array<GeneratorVector, kDimension>, kDimension> build_table() {
  std::array<std::array<GeneratorVector, kDimension>, kDimension> c;
  for (auto& row : c) {
    for (auto& v : row) v.setZero();
  }
  auto set = [&c](G x, G y, G result, Real coefficient) {
    c[index(x)][index(y)][index(result)] = coefficient;
    c[index(y)][index(x)][index(result)] = -coefficient;
  };
  // [a, a^+] = I
  set(G::A, G::Adag, G::Id, 1.0);
  // [K_0, K_+-] = +-K_+-, [K_-, K_+] = 2 K_0
  set(G::K0, G::Kplus, G::Kplus, 1.0);
  set(G::K0, G::Kminus, G::Kminus, -1.0);
  set(G::Kminus, G::Kplus, G::K0, 2.0);
  // [a, K_+] = a^+, [K_-, a^+] = a; [K_+, a^+] = [K_-, a] = 0
  set(G::A, G::Kplus, G::Adag, 1.0);
  set(G::Kminus, G::Adag, G::A, 1.0);
  // [K_0, a^+] = a^+/2, [K_0, a] = -a/2
  set(G::K0, G::Adag, G::Adag, 0.5);
  set(G::K0, G::A, G::A, -0.5);
  return c;
}

const auto& table() {
  static const auto t = build_table();
  return t;
}

std::array<AdjointMatrix, kDimension> build_adjoints() {
  std::array<AdjointMatrix, kDimension> ad;
  for (int i = 0; i < kDimension; ++i) {
    for (int j = 0; j < kDimension; ++j) ad[i].col(j) = table()[i][j];
  }
  return ad;
}

}  // namespace

const char* name(Generator g) {
  switch (g) {
    case G::Id: return "I";
    case G::Adag: return "a+";
    case G::A: return "a";
    case G::Kplus: return "K+";
    case G::K0: return "K0";
    case G::Kminus: return "K-";
  }
  return "?";
}

GeneratorVector unit(Generator g) {
  GeneratorVector v = GeneratorVector::Zero();
  v[index(g)] = 1.0;
  return v;
}

const AdjointMatrix& adjoint_matrix(Generator g) {
  static const auto ad = build_adjoints();
  return ad[index(g)];
}

GeneratorVector bracket(const GeneratorVector& x, const GeneratorVector& y) {
  GeneratorVector out = GeneratorVector::Zero();
  for (int i = 0; i < kDimension; ++i) {
    if (x[i] == Complex{}) continue;
    out += x[i] * (adjoint_matrix(kBasis[i]) * y);
  }
  return out;
}

GeneratorVector ComplexCoefficients::as_generator_vector() const {
  GeneratorVector v = GeneratorVector::Zero();
  v[index(G::Adag)] = std::conj(eps_a);
  v[index(G::A)] = eps_a;
  v[index(G::Kplus)] = eps_plus;
  v[index(G::K0)] = eps_0;
  v[index(G::Kminus)] = eps_minus();
  return v;
}

ComplexCoefficients coeffs_from_real(const RealCoefficients& rc) {
  return {Complex{rc.nu1, rc.nu2}, 2.0 * rc.veps0, Complex{rc.veps1, -rc.veps2}};
}

RealCoefficients coeffs_to_real(const ComplexCoefficients& cc) {
  return {cc.eps_a.real(), cc.eps_a.imag(), 0.5 * cc.eps_0, cc.eps_plus.real(), -cc.eps_plus.imag()};
}

ComplexCoefficients conjugation_dictionary(const ComplexCoefficients& c) {
  return {std::conj(c.eps_a), c.eps_0, c.eps_minus()};
}

Real displacement_phase(Complex a2, Complex a1) { return std::imag(a2 * std::conj(a1)); }

BallCoefficients::BallCoefficients(CVector eps, CMatrix eps0, CMatrix eps_plus)
    : eps_(std::move(eps)), eps0_(std::move(eps0)), eps_plus_(std::move(eps_plus)) {
  const auto n = eps_.size();
  if (n < 1) throw DomainError("BallCoefficients: dimension must be >= 1");
  if (eps0_.rows() != n || eps0_.cols() != n || eps_plus_.rows() != n || eps_plus_.cols() != n) {
    throw DomainError("BallCoefficients: eps0 and eps_plus must be " + std::to_string(n) + "x" +
                      std::to_string(n));
  }
  if (!eps_.allFinite() || !eps0_.allFinite() || !eps_plus_.allFinite()) {
    throw DomainError("BallCoefficients: non-finite entry");
  }
  const Real herm = (eps0_ - eps0_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermiticityTolerance) {
    throw DomainError("BallCoefficients: eps0 is not hermitian (residual " + std::to_string(herm) + ")");
  }
  const Real sym = (eps_plus_ - eps_plus_.transpose()).cwiseAbs().maxCoeff();
  if (sym > kHermiticityTolerance) {
    throw DomainError("BallCoefficients: eps_plus is not symmetric (residual " + std::to_string(sym) + ")");
  }
}

BallCoefficients BallCoefficients::zero(int n) {
  return {CVector::Zero(n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
}

BallCoefficients BallCoefficients::from_disk(const ComplexCoefficients& c) {
  CVector eps(1);
  eps << c.eps_a;
  CMatrix eps0(1, 1);
  eps0 << c.eps_0;
  CMatrix eps_plus(1, 1);
  eps_plus << c.eps_plus;
  return {eps, eps0, eps_plus};
}

RealBallDecomposition ball_real_decomposition(const BallCoefficients& bc) {
  const CMatrix eps_minus = bc.eps_minus();
  const CMatrix half_t = 0.5 * bc.eps0().transpose();
  return {eps_minus.real(), eps_minus.imag(), half_t.real(), half_t.imag()};
}

}  // namespace jacobi::algebra
