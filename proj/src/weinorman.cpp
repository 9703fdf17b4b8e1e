#include "jacobi/weinorman.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace jacobi::weinorman {

namespace {

using algebra::Generator;
using algebra::index;
constexpr Complex kI{0.0, 1.0};

void require_disk(Complex w, const char* where) {
  if (!(std::norm(w) < 1.0)) {
    std::ostringstream msg;
    msg << where << ": |w| = " << std::abs(w) << " is not inside the unit disk";
    throw DomainError(msg.str());
  }
}

// r^2 = 1 / (1 - |w|^2)
Real r_squared(Real u, Real v) { return 1.0 / (1.0 - (u * u + v * v)); }

GeneratorVector element(Complex id, Complex adag, Complex a, Complex kplus, Complex k0, Complex kminus) {
  GeneratorVector g;
  g << id, adag, a, kplus, k0, kminus;
  return g;
}

}  // namespace

GeneratorVector HhatCoefficients::as_generator_vector() const {
  return element(I0, C1, std::conj(C1), Cp, C0, std::conj(Cp));
}

WNParameters wn_parameters(Complex alpha, Complex w) {
  require_disk(w, "wn_parameters");
  WNParameters p;
  p.xi << -0.5 * std::norm(alpha), alpha, -std::conj(alpha), w, std::log1p(-std::norm(w)), -std::conj(w);
  return p;
}

std::array<GeneratorVector, 6> adjoint_chain(const WNParameters& p) {
  const Complex xi3 = p[2], xi4 = p[3], xi5 = p[4], xi6 = p[5];
  const Complex em_half = std::exp(-0.5 * xi5);
  const Complex ep_half = std::exp(0.5 * xi5);
  const Complex em = std::exp(-xi5);
  std::array<GeneratorVector, 6> y;
  y[0] = algebra::unit(Generator::Id);
  y[1] = element(-xi3, em_half, -xi6 * em_half, 0.0, 0.0, 0.0);
  y[2] = element(0.0, xi4 * em_half, ep_half - xi4 * xi6 * em_half, 0.0, 0.0, 0.0);
  y[3] = element(0.0, 0.0, 0.0, em, -2.0 * xi6 * em, xi6 * xi6 * em);
  y[4] = element(0.0, 0.0, 0.0, 0.0, 1.0, -xi6);
  y[5] = algebra::unit(Generator::Kminus);
  return y;
}

std::array<GeneratorVector, 6> adjoint_chain_generic(const WNParameters& p) {
  using algebra::AdjointMatrix;
  std::array<AdjointMatrix, 6> factor;
  for (int k = 0; k < 6; ++k) {
    const AdjointMatrix m = -p[k] * algebra::adjoint_matrix(algebra::kBasis[k]);
    factor[k] = m.exp();
  }
  std::array<GeneratorVector, 6> y;
  for (int i = 0; i < 6; ++i) {
    GeneratorVector v = algebra::unit(algebra::kBasis[i]);
    // innermost factor is xi_{i+1}, outermost xi_6
    for (int k = i + 1; k < 6; ++k) v = factor[k] * v;
    y[i] = v;
  }
  return y;
}

GeneratorVector t_inv_tdot(Complex z, Complex w, Complex dz, Complex dw) {
  require_disk(w, "t_inv_tdot");
  const Real r2 = 1.0 / (1.0 - std::norm(w));
  const Real r = std::sqrt(r2);
  const Complex c_adag = r * (dz - std::conj(dz) * w);
  const Complex c_plus = r2 * dw;
  return element(kI * std::imag(dz * std::conj(z)), c_adag, -std::conj(c_adag), c_plus,
                 2.0 * kI * std::imag(dw * std::conj(w)) * r2, -std::conj(c_plus));
}

RealOperatorCoefficients t_inv_tdot_real(const RealState& s, const RealRates& d) {
  const Real r2 = r_squared(s.u, s.v);
  const Real r = std::sqrt(r2);
  RealOperatorCoefficients out;
  out.I = s.x * d.dy - s.y * d.dx;
  out.N1 = r * ((1.0 + s.u) * d.dy - d.dx * s.v);
  out.N2 = r * ((1.0 - s.u) * d.dx - d.dy * s.v);
  out.K0 = 2.0 * r2 * (d.dv * s.u - d.du * s.v);
  out.K1 = 2.0 * r2 * d.dv;
  out.K2 = 2.0 * r2 * d.du;
  return out;
}

HhatCoefficients hhat_coeffs(const ComplexCoefficients& c, Complex alpha, Complex w) {
  require_disk(w, "hhat_coeffs");
  const Real r2 = 1.0 / (1.0 - std::norm(w));
  const Real r = std::sqrt(r2);
  const Complex ea = c.eps_a;
  const Complex em = c.eps_minus();
  const Complex ep = c.eps_plus;
  const Real e0 = c.eps_0;
  const Complex ca = std::conj(alpha);

  HhatCoefficients h;
  h.I0 = ea * alpha + std::conj(ea) * ca + 0.5 * (e0 * std::norm(alpha) + em * alpha * alpha + ep * ca * ca);
  h.C1 = r * (std::conj(ea) + ea * w + 0.5 * e0 * (alpha + ca * w) + em * alpha * w + ep * ca);
  h.C0 = r2 * (e0 * (1.0 + std::norm(w)) + 2.0 * (em * w + ep * std::conj(w)));
  h.Cp = r2 * (e0 * w + em * w * w + ep);
  return h;
}

RealOperatorCoefficients hhat_coeffs_real(const RealCoefficients& rc, const RealState& s) {
  const Real r2 = r_squared(s.u, s.v);
  const Real r = std::sqrt(r2);
  const Real x = s.x, y = s.y, u = s.u, v = s.v;
  const Real e0 = 2.0 * rc.veps0;  // complex-form eps_0
  const Real e1 = rc.veps1, e2 = rc.veps2;

  RealOperatorCoefficients d;
  d.I = 2.0 * (rc.nu1 * x - rc.nu2 * y) + 0.5 * e0 * (x * x + y * y) + e1 * (x * x - y * y) - 2.0 * e2 * x * y;
  d.N1 = r * (rc.nu1 * (1.0 + u) - rc.nu2 * v + 0.5 * e0 * (x * (1.0 + u) + y * v) + e1 * (x * (1.0 + u) - y * v) -
              e2 * (x * v + (1.0 + u) * y));
  d.N2 = -r * (rc.nu1 * v + rc.nu2 * (u - 1.0) + 0.5 * e0 * (x * v + y * (1.0 - u)) + e1 * (x * v + y * (u - 1.0)) +
               e2 * (x * (u - 1.0) - y * v));
  d.K0 = r2 * (e0 * (1.0 + u * u + v * v) + 4.0 * (e1 * u - e2 * v));
  d.K1 = 2.0 * r2 * (e0 * u + e1 * (u * u - v * v + 1.0) - 2.0 * e2 * u * v);
  d.K2 = -2.0 * r2 * (e0 * v + 2.0 * e1 * u * v + e2 * (-1.0 + u * u - v * v));
  return d;
}

RealRates wn_rhs(const RealCoefficients& rc, const RealState& s) {
  const Real e0 = rc.veps0, e1 = rc.veps1, e2 = rc.veps2;
  RealRates d;
  d.dx = -e2 * s.x + (e0 - e1) * s.y - rc.nu2;
  d.dy = -(e0 + e1) * s.x + e2 * s.y - rc.nu1;
  d.du = 2.0 * s.v * (e1 * s.u + e0) - e2 * (1.0 - s.u * s.u + s.v * s.v);
  d.dv = 2.0 * s.u * (e2 * s.v - e0) - e1 * (1.0 + s.u * s.u - s.v * s.v);
  return d;
}

Real wn_phase_rhs(const RealCoefficients& rc, const RealState& s, const BargmannIndex& k) {
  return rc.nu1 * s.x - rc.nu2 * s.y + 2.0 * k.value() * (rc.veps0 + rc.veps1 * s.u - rc.veps2 * s.v);
}

QuasienergyCoefficients quasienergy_coeffs(const RealCoefficients& rc, const RealState& s, const RealRates& ds,
                                           Real dphi) {
  // E = dphi I + i T^{-1} dT/dtau - T^{-1} H T, and i T^{-1} dT = -(-i T^{-1} dT).
  const RealOperatorCoefficients kin = t_inv_tdot_real(s, ds);
  const RealOperatorCoefficients ham = hhat_coeffs_real(rc, s);
  QuasienergyCoefficients q;
  q.G0 = dphi - kin.I - ham.I;
  q.G1 = -kin.N1 - ham.N1;
  q.G2 = -kin.N2 - ham.N2;
  q.H0 = -kin.K0 - ham.K0;
  q.H1 = -kin.K1 - ham.K1;
  q.H2 = -kin.K2 - ham.K2;
  return q;
}

GeneratorVector wn_solve_step(const GeneratorVector& eps, const WNParameters& xi) {
  const auto y = adjoint_chain(xi);
  algebra::AdjointMatrix m;
  for (int i = 0; i < 6; ++i) m.col(i) = y[i];
  Eigen::JacobiSVD<algebra::AdjointMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Real cond = sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff() : INFINITY;
  if (!(cond <= kWeiNormanConditionLimit)) {
    std::ostringstream msg;
    msg << "wn_solve_step: Wei-Norman matrix is near-singular (condition " << cond << ")";
    throw SingularityError(msg.str());
  }
  return svd.solve(eps);
}

ChartRates wn_chart_rates(const ComplexCoefficients& c, Complex alpha, Complex w, const BargmannIndex& k) {
  const GeneratorVector eps = -kI * hhat_coeffs(c, alpha, w).as_generator_vector();
  const GeneratorVector dxi = wn_solve_step(eps, wn_parameters(alpha, w));
  ChartRates out;
  out.dalpha = dxi[index(Generator::Adag)];
  out.dw = dxi[index(Generator::Kplus)];
  out.dphi = -(dxi[index(Generator::Id)].imag() + k.value() * dxi[index(Generator::K0)].imag());
  out.dxi = dxi;
  return out;
}

SqueezeParams squeeze_real_params(Real u, Real v) {
  const Real s = std::hypot(u, v);
  if (!(s < 1.0)) throw DomainError("squeeze_real_params: (u, v) must lie inside the unit disk");
  if (s == 0.0) return {0.0, 0.0};
  // ln((1+s)/(1-s)) = 2 artanh(s)
  const Real scale = std::atanh(s) / s;
  return {v * scale, u * scale};
}

Real phase_bridge(Real phi, Real phi_D, Real phi_B, Complex alpha, Complex w) {
  const Complex ca = std::conj(alpha);
  return -phi - (phi_D + phi_B) + 0.5 * std::imag(w * ca * ca);
}

Eigen::Matrix<Complex, 6, 1> to_real_basis(const GeneratorVector& g) {
  const Complex c_id = g[index(Generator::Id)];
  const Complex c_adag = g[index(Generator::Adag)];
  const Complex c_a = g[index(Generator::A)];
  const Complex c_p = g[index(Generator::Kplus)];
  const Complex c_0 = g[index(Generator::K0)];
  const Complex c_m = g[index(Generator::Kminus)];
  Eigen::Matrix<Complex, 6, 1> out;
  out << c_id, 0.5 * (c_adag + c_a), 0.5 * kI * (c_adag - c_a), c_0, c_p + c_m, kI * (c_p - c_m);
  return out;
}

}  // namespace jacobi::weinorman
