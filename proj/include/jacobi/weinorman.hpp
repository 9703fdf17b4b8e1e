#pragma once

#include <array>

#include "jacobi/algebra.hpp"
#include "jacobi/geometry.hpp"

/// Wei-Norman product-of-exponentials treatment of the Jacobi group G^J_1.
///
/// The evolution operator is written as T = prod_i exp(xi_i X_i) over the
/// ordered basis (I, a^+, a, K_+, K_0, K_-); on the canonical chart
/// T(alpha, w) = D(alpha) S(w). Matching the quasienergy operator
/// i d/dtau - H on that ansatz gives real equations of motion for
/// alpha = x + i y, w = u + i v and the phase phi of exp(-i phi) T Phi.
namespace jacobi::weinorman {

using algebra::ComplexCoefficients;
using algebra::GeneratorVector;
using algebra::RealCoefficients;
using geometry::BargmannIndex;

/// Exponents xi_1..xi_6 of the ordered product.
struct WNParameters {
  GeneratorVector xi = GeneratorVector::Zero();

  Complex operator[](int i) const { return xi[i]; }
};

/// alpha = x + i y, w = u + i v.
struct RealState {
  Real x = 0.0;
  Real y = 0.0;
  Real u = 0.0;
  Real v = 0.0;

  Complex alpha() const { return {x, y}; }
  Complex w() const { return {u, v}; }
  static RealState from_complex(Complex alpha, Complex w) { return {alpha.real(), alpha.imag(), w.real(), w.imag()}; }
};

struct RealRates {
  Real dx = 0.0;
  Real dy = 0.0;
  Real du = 0.0;
  Real dv = 0.0;

  Complex dalpha() const { return {dx, dy}; }
  Complex dw() const { return {du, dv}; }
};

/// Real coefficients over the real basis (I, N_1, N_2, K_0, K_1, K_2), with
/// N_1 = a + a^+, N_2 = i (a - a^+), K_1 = (K_+ + K_-)/2, K_2 = (K_+ - K_-)/(2i).
struct RealOperatorCoefficients {
  Real I = 0.0;
  Real N1 = 0.0;
  Real N2 = 0.0;
  Real K0 = 0.0;
  Real K1 = 0.0;
  Real K2 = 0.0;
};

/// Coefficients of the quasienergy operator over (I, N_1, N_2, K_0, K_1, K_2).
struct QuasienergyCoefficients {
  Real G0 = 0.0;
  Real G1 = 0.0;
  Real G2 = 0.0;
  Real H0 = 0.0;
  Real H1 = 0.0;
  Real H2 = 0.0;
};

/// Coefficients of T^{-1} H T = I0 + C1 a^+ + conj(C1) a + C0 K_0 + Cp K_+ + conj(Cp) K_-.
struct HhatCoefficients {
  Complex I0;
  Complex C1;
  Complex C0;
  Complex Cp;

  GeneratorVector as_generator_vector() const;
};

/// Canonical-chart exponents of D(alpha) S(w):
/// (-|alpha|^2/2, alpha, -conj(alpha), w, ln(1 - |w|^2), -conj(w)).
WNParameters wn_parameters(Complex alpha, Complex w);

/// Y_i = exp(-xi_6 ad X_6) ... exp(-xi_{i+1} ad X_{i+1}) X_i, closed form.
std::array<GeneratorVector, 6> adjoint_chain(const WNParameters& xi);

/// The same chain evaluated as a product of 6x6 adjoint-matrix exponentials.
std::array<GeneratorVector, 6> adjoint_chain_generic(const WNParameters& xi);

/// T^{-1} dT/dt on the canonical chart (z, w) for velocities (dz, dw).
GeneratorVector t_inv_tdot(Complex z, Complex w, Complex dz, Complex dw);

/// -i T^{-1} dT/dtau in the real basis.
RealOperatorCoefficients t_inv_tdot_real(const RealState& s, const RealRates& ds);

/// Conjugated Hamiltonian T(alpha, w)^{-1} H T(alpha, w).
HhatCoefficients hhat_coeffs(const ComplexCoefficients& c, Complex alpha, Complex w);

/// T^{-1} H T in the real basis: (D0, D1, D2, F0, F1, F2) stored as (I, N1, N2, K0, K1, K2).
RealOperatorCoefficients hhat_coeffs_real(const RealCoefficients& rc, const RealState& s);

/// Real equations of motion for (x, y, u, v).
RealRates wn_rhs(const RealCoefficients& rc, const RealState& s);

/// dphi = nu1 x - nu2 y + 2k (veps0 + veps1 u - veps2 v).
Real wn_phase_rhs(const RealCoefficients& rc, const RealState& s, const BargmannIndex& k);

/// Coefficients of the quasienergy operator for arbitrary velocities (ds, dphi).
QuasienergyCoefficients quasienergy_coeffs(const RealCoefficients& rc, const RealState& s, const RealRates& ds,
                                           Real dphi);

/// Condition-number threshold above which `wn_solve_step` refuses.
inline constexpr Real kWeiNormanConditionLimit = 1e12;

/// Solves sum_i dxi_i Y_i(xi) = sum_j eps_j X_j for dxi.
GeneratorVector wn_solve_step(const GeneratorVector& eps, const WNParameters& xi);

/// Chart velocities and phase rate obtained from `wn_solve_step` with
/// eps = -i (coefficients of T^{-1} H T): dalpha = dxi_2, dw = dxi_4 and
/// dphi = -(Im dxi_1 + k Im dxi_5).
struct ChartRates {
  Complex dalpha;
  Complex dw;
  Real dphi;
  GeneratorVector dxi;
};
ChartRates wn_chart_rates(const ComplexCoefficients& c, Complex alpha, Complex w, const BargmannIndex& k);

struct SqueezeParams {
  Real k1;
  Real k2;
};

/// k1 = (v/2s) ln((1+s)/(1-s)), k2 = (u/2s) ln((1+s)/(1-s)), s = |(u, v)|; (0, 0) at s = 0.
SqueezeParams squeeze_real_params(Real u, Real v);

/// -phi - (phi_D + phi_B) + Im(w conj(alpha)^2)/2.
Real phase_bridge(Real phi, Real phi_D, Real phi_B, Complex alpha, Complex w);

/// Coefficients over (I, N_1, N_2, K_0, K_1, K_2) of an element given over
/// (I, a^+, a, K_+, K_0, K_-).
Eigen::Matrix<Complex, 6, 1> to_real_basis(const GeneratorVector& v);

}  // namespace jacobi::weinorman
