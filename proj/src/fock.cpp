#include "jacobi/fock.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include "jacobi/integrate.hpp"

namespace jacobi::fock {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

void FockBasisSpec::validate() const {
  if (dim < 2) throw DomainError("FockBasisSpec: dim must be >= 2");
}

geometry::BargmannIndex FockBasisSpec::bargmann_index() const {
  return geometry::BargmannIndex(sector == Sector::Even ? 0.25 : 0.75);
}

CVector FockBasisSpec::cyclic_vector() const {
  validate();
  CVector v = CVector::Zero(dim);
  v[sector == Sector::Even ? 0 : 1] = 1.0;
  return v;
}

OperatorSet build_generators(const FockBasisSpec& spec) {
  spec.validate();
  const int n = spec.dim;
  OperatorSet ops;
  ops.a = CMatrix::Zero(n, n);
  for (int m = 1; m < n; ++m) ops.a(m - 1, m) = std::sqrt(static_cast<Real>(m));
  ops.adag = ops.a.adjoint();
  // (a^+)^2/2 with one rounding per entry: sqrt((m+1)(m+2))/2.
  ops.Kp = CMatrix::Zero(n, n);
  for (int m = 0; m + 2 < n; ++m) ops.Kp(m + 2, m) = 0.5 * std::sqrt(static_cast<Real>(m + 1) * (m + 2));
  ops.Km = ops.Kp.transpose();
  ops.K0 = CMatrix::Zero(n, n);
  for (int m = 0; m < n; ++m) ops.K0(m, m) = 0.25 * (2.0 * m + 1.0);
  ops.Id = CMatrix::Identity(n, n);
  return ops;
}

CMatrix OperatorSet::element(const algebra::GeneratorVector& g) const {
  return g[0] * Id + g[1] * adag + g[2] * a + g[3] * Kp + g[4] * K0 + g[5] * Km;
}

Real tail_fraction(const StateVector& psi) {
  const Real total = psi.squaredNorm();
  if (total == 0.0) return 0.0;
  const Eigen::Index tail = std::min<Eigen::Index>(kTailLevels, psi.size());
  return psi.tail(tail).squaredNorm() / total;
}

void require_adequate(const StateVector& psi, const char* what) {
  const Real tail = tail_fraction(psi);
  if (!(tail <= kTailTolerance)) {
    std::ostringstream msg;
    msg << what << ": truncation inadequate, last " << kTailLevels << " levels carry " << tail
        << " of the norm (dim " << psi.size() << ")";
    throw TruncationError(msg.str());
  }
}

StateVector coherent_vector(Complex z, Complex w, const OperatorSet& ops) {
  if (!(std::norm(w) < 1.0)) throw DomainError("coherent_vector: |w| must be < 1");
  // z a^+ + w K_+ raises the level, so the exponential series applied to |0>
  // terminates after at most dim terms.
  const CMatrix gen = z * ops.adag + w * ops.Kp;
  StateVector term = StateVector::Zero(ops.dim());
  term[0] = 1.0;
  StateVector sum = term;
  for (int j = 1; j < ops.dim(); ++j) {
    term = (gen * term) / static_cast<Real>(j);
    if (term.squaredNorm() == 0.0) break;
    sum += term;
  }
  require_adequate(sum, "coherent_vector");
  return sum;
}

StateVector coherent_vector(Complex z, Complex w, const FockBasisSpec& spec) {
  if (spec.sector != Sector::Even) throw DomainError("coherent_vector: Jacobi coherent states need the even sector");
  return coherent_vector(z, w, build_generators(spec));
}

CMatrix displacement_operator(Complex alpha, const OperatorSet& ops) {
  const CMatrix gen = alpha * ops.adag - std::conj(alpha) * ops.a;
  return gen.exp();
}

CMatrix squeeze_operator(Complex w, const OperatorSet& ops) {
  if (!(std::norm(w) < 1.0)) throw DomainError("squeeze_operator: |w| must be < 1");
  const Real r = std::abs(w);
  const Complex zeta = r == 0.0 ? Complex{} : w / r * std::atanh(r);
  const CMatrix gen = zeta * ops.Kp - std::conj(zeta) * ops.Km;
  return gen.exp();
}

StateVector expm_apply(const CMatrix& A, const StateVector& v) {
  if (A.rows() != A.cols() || A.cols() != v.size()) throw DomainError("expm_apply: dimension mismatch");
  const Eigen::SparseMatrix<Complex> sp = A.sparseView();
  const Real norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm1)));
  const Real scale = 1.0 / substeps;
  StateVector out = v;
  for (int s = 0; s < substeps; ++s) {
    StateVector term = out;
    StateVector sum = out;
    const Real floor = std::numeric_limits<Real>::epsilon() * 1e-2 * out.norm();
    for (int j = 1; j <= 60; ++j) {
      term = (sp * term) * (scale / j);
      sum += term;
      if (term.norm() <= floor) break;
    }
    out = sum;
  }
  return out;
}

StateVector squeezed_state(Complex alpha, Complex w, const OperatorSet& ops) {
  if (!(std::norm(w) < 1.0)) throw DomainError("squeezed_state: |w| must be < 1");
  StateVector vac = StateVector::Zero(ops.dim());
  vac[0] = 1.0;
  const Real r = std::abs(w);
  const Complex zeta = r == 0.0 ? Complex{} : w / r * std::atanh(r);
  const StateVector s = expm_apply(zeta * ops.Kp - std::conj(zeta) * ops.Km, vac);
  require_adequate(s, "squeezed_state (squeeze)");
  const StateVector out = expm_apply(alpha * ops.adag - std::conj(alpha) * ops.a, s);
  require_adequate(out, "squeezed_state");
  return out;
}

CMatrix hamiltonian_matrix(const ComplexCoefficients& c, const OperatorSet& ops) {
  return ops.element(c.as_generator_vector());
}

StateVector propagate(const StateVector& psi0, const CMatrix& H, Real t, int steps, Propagator method) {
  if (H.rows() != psi0.size()) throw DomainError("propagate: dimension mismatch");
  if (t == 0.0) return psi0;
  if (method == Propagator::Exponential) {
    const CMatrix u = (-kI * t * H).exp();
    return u * psi0;
  }
  if (steps < 1) throw DomainError("propagate: steps must be >= 1");
  const integrate::Rhs<CVector> f = [&H](Real, const CVector& psi) -> CVector { return -kI * (H * psi); };
  const Real h = t / steps;
  const Real n0 = psi0.norm();
  CVector psi = psi0;
  for (int i = 0; i < steps; ++i) {
    psi = integrate::rk4_step(f, i * h, psi, h);
    if (!(std::abs(psi.norm() - n0) <= kNormDriftTolerance * std::max(1.0, n0))) {
      std::ostringstream msg;
      msg << "propagate: norm drift " << std::abs(psi.norm() - n0) << " at step " << i + 1
          << "; the step is too large for this Hamiltonian";
      throw Error(msg.str());
    }
  }
  return psi;
}

Real expectation(const StateVector& psi, const CMatrix& H) {
  return (psi.dot(H * psi)).real() / psi.squaredNorm();
}

Real berry_phase_rate(Complex eta, Complex w, Complex deta, Complex dw, const OperatorSet& ops, Real h) {
  auto normalized = [&](Real s) {
    const Complex e = eta + s * deta;
    const Complex ww = w + s * dw;
    StateVector v = coherent_vector(geometry::fc_forward(e, ww), ww, ops);
    return StateVector(v / v.norm());
  };
  const StateVector e0 = normalized(0.0);
  const StateVector de = (normalized(h) - normalized(-h)) / (2.0 * h);
  // <e|de> is imaginary for a normalized path; i <e|de> = -Im <e|de>.
  return -e0.dot(de).imag();
}

FidelityReport solution_fidelity(const ComplexCoefficients& c, const weinorman::RealState& s0, Real t,
                                 const FockBasisSpec& spec, Real step) {
  if (spec.sector != Sector::Even) throw DomainError("solution_fidelity: requires the even sector");
  const OperatorSet ops = build_generators(spec);
  const auto k = spec.bargmann_index();
  const auto rc = algebra::coeffs_to_real(c);

  FidelityReport rep;
  const StateVector psi0 = squeezed_state(s0.alpha(), s0.w(), ops);
  const CMatrix H = hamiltonian_matrix(c, ops);
  const StateVector direct = propagate(psi0, H, t, 0, Propagator::Exponential);

  RVector y(5);
  y << s0.x, s0.y, s0.u, s0.v, 0.0;
  if (t > 0.0) {
    const integrate::Rhs<RVector> f = [&](Real, const RVector& q) -> RVector {
      const weinorman::RealState s{q[0], q[1], q[2], q[3]};
      const auto d = weinorman::wn_rhs(rc, s);
      RVector out(5);
      out << d.dx, d.dy, d.du, d.dv, weinorman::wn_phase_rhs(rc, s, k);
      return out;
    };
    const integrate::TimeGrid grid{0.0, t, step};
    y = integrate::integrate(f, y, grid, integrate::Method::RK4, [](int, Real time, const RVector& q) {
      if (!(q[2] * q[2] + q[3] * q[3] < 1.0)) {
        std::ostringstream msg;
        msg << "solution_fidelity: Wei-Norman trajectory left the disk at t = " << time;
        throw DomainError(msg.str());
      }
    });
  }
  rep.final_state = {y[0], y[1], y[2], y[3]};
  rep.final_phase = y[4];
  const StateVector cs = std::exp(-kI * y[4]) * squeezed_state(rep.final_state.alpha(), rep.final_state.w(), ops);

  rep.tail = std::max(tail_fraction(direct), tail_fraction(cs));
  require_adequate(direct, "solution_fidelity (direct propagation)");
  const Complex overlap = direct.dot(cs);
  rep.fidelity = std::abs(overlap);
  rep.phase_error = std::abs(std::arg(overlap));
  return rep;
}

}  // namespace jacobi::fock
