#pragma once

#include "jacobi/algebra.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/weinorman.hpp"

/// Brute-force truncated Fock-space oracle.
///
/// One bosonic mode with K_+ = (a^+)^2/2, K_- = a^2/2, K_0 = (2 a^+ a + 1)/4.
/// The even sector (cyclic vector |0>) carries Bargmann index k = 1/4, the
/// odd sector (|1>) k = 3/4. Jacobi-group coherent states need a e_0 = 0 and
/// therefore live in the even sector.
namespace jacobi::fock {

using algebra::ComplexCoefficients;

enum class Sector { Even, Odd };

struct FockBasisSpec {
  int dim = 200;
  Sector sector = Sector::Even;

  void validate() const;
  /// k = 1/4 (even) or 3/4 (odd).
  geometry::BargmannIndex bargmann_index() const;
  /// |0> or |1>.
  CVector cyclic_vector() const;
};

struct OperatorSet {
  CMatrix a;
  CMatrix adag;
  CMatrix K0;
  CMatrix Kp;
  CMatrix Km;
  CMatrix Id;

  int dim() const { return static_cast<int>(a.rows()); }
  /// Matrix of a general algebra element over (I, a^+, a, K_+, K_0, K_-).
  CMatrix element(const algebra::GeneratorVector& g) const;
};

using StateVector = CVector;

/// Levels counted as the truncation tail.
inline constexpr int kTailLevels = 10;
/// Largest admissible tail mass relative to the total.
inline constexpr Real kTailTolerance = 1e-10;

OperatorSet build_generators(const FockBasisSpec& spec);

/// Mass fraction carried by the last `kTailLevels` levels.
Real tail_fraction(const StateVector& psi);
/// Throws TruncationError when `tail_fraction(psi)` exceeds `kTailTolerance`.
void require_adequate(const StateVector& psi, const char* what);

/// Unnormalized Perelomov vector e_{z,w} = exp(z a^+ + w K_+) |0>.
StateVector coherent_vector(Complex z, Complex w, const OperatorSet& ops);
StateVector coherent_vector(Complex z, Complex w, const FockBasisSpec& spec);

/// D(alpha) = exp(alpha a^+ - conj(alpha) a) as a dense matrix exponential.
CMatrix displacement_operator(Complex alpha, const OperatorSet& ops);
/// S(w) = exp(zeta K_+ - conj(zeta) K_-), w = (zeta/|zeta|) tanh|zeta|.
CMatrix squeeze_operator(Complex w, const OperatorSet& ops);

/// exp(A) v by a Taylor series over ceil(|A|_1) substeps, with A applied as a
/// sparse matrix. Intended for the banded, skew-hermitian generators used here.
StateVector expm_apply(const CMatrix& A, const StateVector& v);

/// T(alpha, w) |0> = D(alpha) S(w) |0> from the unitary exponentials.
StateVector squeezed_state(Complex alpha, Complex w, const OperatorSet& ops);

/// H = eps_a a + conj(eps_a) a^+ + eps_0 K_0 + eps_+ K_+ + eps_- K_-.
CMatrix hamiltonian_matrix(const ComplexCoefficients& c, const OperatorSet& ops);

enum class Propagator { RK4, Exponential };

/// Largest admissible change of the norm during RK4 propagation.
inline constexpr Real kNormDriftTolerance = 1e-8;

/// Solves i dpsi/dtau = H psi over [0, t].
StateVector propagate(const StateVector& psi0, const CMatrix& H, Real t, int steps,
                      Propagator method = Propagator::RK4);

/// <psi|H|psi> / <psi|psi>.
Real expectation(const StateVector& psi, const CMatrix& H);

/// Berry-phase rate i <e~|d e~/dt> of the normalized vector e~_{z,w},
/// z = eta - w conj(eta), moving with velocities (deta, dw); central
/// differences with step h.
Real berry_phase_rate(Complex eta, Complex w, Complex deta, Complex dw, const OperatorSet& ops, Real h = 1e-4);

struct FidelityReport {
  /// |<psi_direct, psi_cs>|
  Real fidelity = 0.0;
  /// |arg <psi_direct, psi_cs>|
  Real phase_error = 0.0;
  /// Largest tail fraction seen in either state.
  Real tail = 0.0;
  weinorman::RealState final_state;
  Real final_phase = 0.0;
};

/// Propagates T(xi_0)|0> directly under H(c) and compares with
/// exp(-i phi) T(xi(t)) |0> where (xi, phi) solve the real Wei-Norman
/// equations at k = 1/4 (RK4, step `step`).
FidelityReport solution_fidelity(const ComplexCoefficients& c, const weinorman::RealState& s0, Real t,
                                 const FockBasisSpec& spec, Real step = 1e-3);

}  // namespace jacobi::fock
