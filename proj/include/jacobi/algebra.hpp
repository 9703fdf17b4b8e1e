#pragma once

#include <array>

#include "jacobi/common.hpp"

/// The Jacobi algebra g^J_1 = h_1 x| su(1,1) and the coefficient records of
/// Hamiltonians linear in its generators.
namespace jacobi::algebra {

/// Ordered generator basis X_1..X_6 = (I, a^+, a, K_+, K_0, K_-).
enum class Generator : int { Id = 0, Adag = 1, A = 2, Kplus = 3, K0 = 4, Kminus = 5 };

inline constexpr int kDimension = 6;
inline constexpr std::array<Generator, kDimension> kBasis = {
    Generator::Id, Generator::Adag, Generator::A, Generator::Kplus, Generator::K0, Generator::Kminus};

inline constexpr int index(Generator g) { return static_cast<int>(g); }
const char* name(Generator g);

/// Coefficients of an algebra element over the ordered basis.
using GeneratorVector = Eigen::Matrix<Complex, kDimension, 1>;
using AdjointMatrix = Eigen::Matrix<Complex, kDimension, kDimension>;

GeneratorVector unit(Generator g);

/// ad_{X_g} in the ordered basis: column j holds the coefficients of [X_g, X_j].
/// Entries are the exact rationals of the defining brackets.
const AdjointMatrix& adjoint_matrix(Generator g);

/// [x, y] for general algebra elements.
GeneratorVector bracket(const GeneratorVector& x, const GeneratorVector& y);

/// Hermitian Hamiltonian
///   H = eps_a a + conj(eps_a) a^+ + eps_0 K_0 + eps_+ K_+ + eps_- K_-,
/// with eps_- = conj(eps_+). eps_- is never stored, so hermiticity holds by
/// construction.
struct ComplexCoefficients {
  Complex eps_a{0.0, 0.0};
  Real eps_0 = 0.0;
  Complex eps_plus{0.0, 0.0};

  Complex eps_minus() const { return std::conj(eps_plus); }

  /// The Hamiltonian as an algebra element.
  GeneratorVector as_generator_vector() const;

  friend bool operator==(const ComplexCoefficients&, const ComplexCoefficients&) = default;
};

/// Real-basis form H = 2 veps0 K_0 + 2 veps1 K_1 + 2 veps2 K_2 + nu1 N_1 + nu2 N_2
/// (N_1 = a + a^+, N_2 = i (a - a^+), K_1 = (K_+ + K_-)/2, K_2 = (K_+ - K_-)/(2i)),
/// so that eps_a = nu1 + i nu2, eps_0 = 2 veps0, eps_+ = veps1 - i veps2.
struct RealCoefficients {
  Real nu1 = 0.0;
  Real nu2 = 0.0;
  Real veps0 = 0.0;
  Real veps1 = 0.0;
  Real veps2 = 0.0;

  friend bool operator==(const RealCoefficients&, const RealCoefficients&) = default;
};

ComplexCoefficients coeffs_from_real(const RealCoefficients& rc);
RealCoefficients coeffs_to_real(const ComplexCoefficients& cc);

/// The notational dictionary between the two derivations of the equations of
/// motion: eps_a <-> conj(eps_a), eps_+ <-> eps_- (eps_0 unchanged). It is an
/// involution. Only comparison code applies it; neither method uses it
/// internally.
ComplexCoefficients conjugation_dictionary(const ComplexCoefficients& c);

/// theta(a2, a1) = Im(a2 conj(a1)), the phase in D(a2) D(a1) = e^{i theta} D(a2 + a1).
Real displacement_phase(Complex a2, Complex a1);

/// Coefficients of a Hamiltonian linear in the generators of G^J_n:
///   H = eps_i a_i + conj(eps_i) a_i^+ + eps0_ij K0_ij + eps-_ij K-_ij + eps+_ij K+_ij.
/// The constructor enforces hermiticity (eps0 hermitian, eps+ symmetric) to
/// `kHermiticityTolerance`; eps- := eps+^dagger.
class BallCoefficients {
 public:
  static constexpr Real kHermiticityTolerance = 1e-12;

  BallCoefficients(CVector eps, CMatrix eps0, CMatrix eps_plus);

  /// Zero Hamiltonian of dimension n.
  static BallCoefficients zero(int n);
  /// The n = 1 embedding of a disk Hamiltonian.
  static BallCoefficients from_disk(const ComplexCoefficients& c);

  int n() const { return static_cast<int>(eps_.size()); }
  const CVector& eps() const { return eps_; }
  const CMatrix& eps0() const { return eps0_; }
  const CMatrix& eps_plus() const { return eps_plus_; }
  CMatrix eps_minus() const { return eps_plus_.adjoint(); }

 private:
  CVector eps_;
  CMatrix eps0_;
  CMatrix eps_plus_;
};

/// eps_- = m + i n, eps0^t / 2 = p + i q with m, n, p symmetric and q antisymmetric.
struct RealBallDecomposition {
  RMatrix m;
  RMatrix n;
  RMatrix p;
  RMatrix q;
};

RealBallDecomposition ball_real_decomposition(const BallCoefficients& bc);

}  // namespace jacobi::algebra
