#include <doctest.h>

#include <random>

#include "jacobi/algebra.hpp"
#include "jacobi/serialize.hpp"

using namespace jacobi;
using namespace jacobi::algebra;

namespace {

GeneratorVector X(Generator g) { return unit(g); }

constexpr Complex i_{0.0, 1.0};

GeneratorVector random_element(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  GeneratorVector v;
  for (int i = 0; i < kDimension; ++i) v[i] = {d(rng), d(rng)};
  return v;
}

}  // namespace

TEST_CASE("brackets of the ordered basis") {
  using G = Generator;
  CHECK(bracket(X(G::A), X(G::Adag)) == X(G::Id));
  CHECK(bracket(X(G::K0), X(G::Kplus)) == X(G::Kplus));
  CHECK(bracket(X(G::K0), X(G::Kminus)) == GeneratorVector(-X(G::Kminus)));
  CHECK(bracket(X(G::Kminus), X(G::Kplus)) == GeneratorVector(2.0 * X(G::K0)));
  CHECK(bracket(X(G::A), X(G::Kplus)) == X(G::Adag));
  CHECK(bracket(X(G::Kminus), X(G::Adag)) == X(G::A));
  CHECK(bracket(X(G::K0), X(G::Adag)) == GeneratorVector(0.5 * X(G::Adag)));
  CHECK(bracket(X(G::K0), X(G::A)) == GeneratorVector(-0.5 * X(G::A)));
  // vanishing brackets
  CHECK(bracket(X(G::Adag), X(G::Kplus)).isZero(0.0));
  CHECK(bracket(X(G::A), X(G::Kminus)).isZero(0.0));
}

TEST_CASE("identity is central") {
  CHECK(adjoint_matrix(Generator::Id).isZero(0.0));
  for (Generator g : kBasis) CHECK(bracket(X(g), X(Generator::Id)).isZero(0.0));
}

TEST_CASE("adjoint matrices: column j is [X_i, X_j]") {
  const auto& ad = adjoint_matrix(Generator::K0);
  CHECK(ad(index(Generator::Adag), index(Generator::Adag)) == Complex(0.5));
  CHECK(ad(index(Generator::A), index(Generator::A)) == Complex(-0.5));
  const auto& ad_a = adjoint_matrix(Generator::A);
  CHECK(ad_a.col(index(Generator::Kplus)) == X(Generator::Adag));
}

TEST_CASE("antisymmetry and Jacobi identity on the basis") {
  for (Generator x : kBasis)
    for (Generator y : kBasis) {
      CHECK((bracket(X(x), X(y)) + bracket(X(y), X(x))).isZero(0.0));
      for (Generator z : kBasis) {
        const GeneratorVector cyc = bracket(X(x), bracket(X(y), X(z))) + bracket(X(y), bracket(X(z), X(x))) +
                                    bracket(X(z), bracket(X(x), X(y)));
        CHECK(cyc.isZero(0.0));
      }
    }
}

TEST_CASE("ad is a representation: ad[x,y] = [ad x, ad y]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const GeneratorVector x = random_element(rng);
    const GeneratorVector y = random_element(rng);
    AdjointMatrix adx = AdjointMatrix::Zero(), ady = AdjointMatrix::Zero(), adxy = AdjointMatrix::Zero();
    const GeneratorVector xy = bracket(x, y);
    for (int i = 0; i < kDimension; ++i) {
      adx += x[i] * adjoint_matrix(kBasis[i]);
      ady += y[i] * adjoint_matrix(kBasis[i]);
      adxy += xy[i] * adjoint_matrix(kBasis[i]);
    }
    CHECK((adxy - (adx * ady - ady * adx)).norm() < 1e-12);
  }
}

TEST_CASE("coeffs_from_real examples") {
  const auto z = coeffs_from_real({0, 0, 0, 0, 0});
  CHECK(z == ComplexCoefficients{});
  const auto a = coeffs_from_real({1, 0, 0, 0, 0});
  CHECK(a.eps_a == Complex(1.0));
  CHECK(a.eps_0 == 0.0);
  CHECK(a.eps_plus == Complex(0.0));
  const auto b = coeffs_from_real({0, 0, 1, 1, 1});
  CHECK(b.eps_a == Complex(0.0));
  CHECK(b.eps_0 == 2.0);
  CHECK(b.eps_plus == Complex(1.0, -1.0));
}

TEST_CASE("coeffs_to_real examples and round trip") {
  CHECK(coeffs_to_real({}) == RealCoefficients{});
  const auto r1 = coeffs_to_real({Complex(1.0), 0.0, Complex(0.0)});
  CHECK(r1.nu1 == 1.0);
  CHECK(r1.nu2 == 0.0);
  const auto r2 = coeffs_to_real({Complex(0.0), 0.0, Complex(0.0, -1.0)});
  CHECK(r2.veps1 == 0.0);
  CHECK(r2.veps2 == 1.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const RealCoefficients rc{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const RealCoefficients back = coeffs_to_real(coeffs_from_real(rc));
    CHECK(std::abs(back.nu1 - rc.nu1) < 1e-15);
    CHECK(std::abs(back.nu2 - rc.nu2) < 1e-15);
    CHECK(std::abs(back.veps0 - rc.veps0) < 1e-15);
    CHECK(std::abs(back.veps1 - rc.veps1) < 1e-15);
    CHECK(std::abs(back.veps2 - rc.veps2) < 1e-15);
  }
}

TEST_CASE("real-basis Hamiltonian equals its complex form") {
  // H = 2 veps0 K0 + 2 veps1 K1 + 2 veps2 K2 + nu1 N1 + nu2 N2 with
  // N1 = a + a^+, N2 = i (a - a^+), K1 = (K+ + K-)/2, K2 = (K+ - K-)/(2i).
  using G = Generator;
  const RealCoefficients rc{0.3, -0.7, 1.1, 0.4, -0.9};
  const GeneratorVector N1 = X(G::A) + X(G::Adag);
  const GeneratorVector N2 = i_ * (X(G::A) - X(G::Adag));
  const GeneratorVector K1 = 0.5 * (X(G::Kplus) + X(G::Kminus));
  const GeneratorVector K2 = (X(G::Kplus) - X(G::Kminus)) / (2.0 * i_);
  const GeneratorVector h =
      2.0 * rc.veps0 * X(G::K0) + 2.0 * rc.veps1 * K1 + 2.0 * rc.veps2 * K2 + rc.nu1 * N1 + rc.nu2 * N2;
  CHECK((h - coeffs_from_real(rc).as_generator_vector()).norm() < 1e-15);
}

TEST_CASE("hermitian Hamiltonian as an algebra element") {
  const ComplexCoefficients c{Complex(0.2, 0.3), 1.5, Complex(-0.4, 0.8)};
  const GeneratorVector g = c.as_generator_vector();
  CHECK(g[index(Generator::A)] == c.eps_a);
  CHECK(g[index(Generator::Adag)] == std::conj(c.eps_a));
  CHECK(g[index(Generator::K0)] == Complex(c.eps_0));
  CHECK(g[index(Generator::Kplus)] == c.eps_plus);
  CHECK(g[index(Generator::Kminus)] == std::conj(c.eps_plus));
  CHECK(g[index(Generator::Id)] == Complex(0.0));
}

TEST_CASE("conjugation dictionary is an involution fixing eps_0") {
  const ComplexCoefficients c{Complex(0.2, 0.3), 1.5, Complex(-0.4, 0.8)};
  const auto d = conjugation_dictionary(c);
  CHECK(d.eps_a == std::conj(c.eps_a));
  CHECK(d.eps_plus == c.eps_minus());
  CHECK(d.eps_0 == c.eps_0);
  CHECK(conjugation_dictionary(d) == c);
}

TEST_CASE("displacement phase") {
  CHECK(displacement_phase(0.0, Complex(0.3, 0.4)) == 0.0);
  CHECK(displacement_phase(Complex(0.0, 1.0), Complex(1.0)) == doctest::Approx(1.0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 20; ++trial) {
    const Complex a(d(rng), d(rng)), b(d(rng), d(rng));
    CHECK(displacement_phase(a, b) == -displacement_phase(b, a));
  }
}

TEST_CASE("ball coefficients validation") {
  CVector eps(2);
  eps << Complex(0.1, 0.2), Complex(-0.3, 0.0);
  CMatrix herm(2, 2);
  herm << 1.0, Complex(0.2, 0.5), Complex(0.2, -0.5), -0.5;
  CMatrix sym(2, 2);
  sym << Complex(0.3, 0.1), Complex(0.2, -0.2), Complex(0.2, -0.2), Complex(0.0, 0.4);
  CHECK_NOTHROW(BallCoefficients(eps, herm, sym));

  CMatrix not_herm = herm;
  not_herm(0, 1) += 1e-9;
  CHECK_THROWS_AS(BallCoefficients(eps, not_herm, sym), DomainError);
  CMatrix not_sym = sym;
  not_sym(1, 0) += Complex(0.0, 1e-9);
  CHECK_THROWS_AS(BallCoefficients(eps, herm, not_sym), DomainError);
  CHECK_THROWS_AS(BallCoefficients(CVector::Zero(3), herm, sym), DomainError);
  CMatrix bad = herm;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(BallCoefficients(eps, bad, sym), DomainError);

  const BallCoefficients bc(eps, herm, sym);
  CHECK(bc.eps_minus() == CMatrix(sym.adjoint()));
  CHECK(CMatrix(bc.eps_minus().transpose()) == bc.eps_minus());
}

TEST_CASE("ball real decomposition") {
  const auto z = ball_real_decomposition(BallCoefficients::zero(2));
  CHECK(z.m.isZero(0.0));
  CHECK(z.n.isZero(0.0));
  CHECK(z.p.isZero(0.0));
  CHECK(z.q.isZero(0.0));

  // eps_- = 3 + 4i  <=>  eps_+ = 3 - 4i
  const auto d1 = ball_real_decomposition(BallCoefficients::from_disk({Complex(0.0), 2.0, Complex(3.0, -4.0)}));
  CHECK(d1.m(0, 0) == 3.0);
  CHECK(d1.n(0, 0) == 4.0);
  CHECK(d1.p(0, 0) == 1.0);
  CHECK(d1.q(0, 0) == 0.0);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix a(3, 3), b(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        a(i, j) = {d(rng), d(rng)};
        b(i, j) = {d(rng), d(rng)};
      }
    const CMatrix herm = 0.5 * (a + a.adjoint());
    const CMatrix sym = 0.5 * (b + b.transpose());
    const BallCoefficients bc(CVector::Zero(3), herm, sym);
    const auto r = ball_real_decomposition(bc);
    CHECK((r.m - r.m.transpose()).norm() == 0.0);
    CHECK((r.n - r.n.transpose()).norm() == 0.0);
    CHECK((r.p - r.p.transpose()).norm() == 0.0);
    CHECK((r.q + r.q.transpose()).norm() == 0.0);
    const CMatrix em = r.m.cast<Complex>() + i_ * r.n.cast<Complex>();
    CHECK((em - bc.eps_minus()).norm() < 1e-15);
    const CMatrix half = r.p.cast<Complex>() + i_ * r.q.cast<Complex>();
    CHECK((half - 0.5 * herm.transpose()).norm() < 1e-15);
  }
}

TEST_CASE("coefficient JSON round trip") {
  const ComplexCoefficients c{Complex(0.25, -1.5), 0.75, Complex(1e-3, 2.0)};
  const auto j = serialize::to_json(c);
  CHECK(j.contains("eps_a_re"));
  CHECK(j.contains("eps_plus_im"));
  CHECK(serialize::complex_coefficients_from_json(j, "c") == c);

  const RealCoefficients rc{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(serialize::real_coefficients_from_json(serialize::to_json(rc), "r") == rc);

  CVector eps(2);
  eps << Complex(0.1, 0.2), Complex(-0.3, 0.0);
  CMatrix herm(2, 2);
  herm << 1.0, Complex(0.2, 0.5), Complex(0.2, -0.5), -0.5;
  CMatrix sym(2, 2);
  sym << Complex(0.3, 0.1), Complex(0.2, -0.2), Complex(0.2, -0.2), Complex(0.0, 0.4);
  const BallCoefficients bc(eps, herm, sym);
  const auto back = serialize::ball_coefficients_from_json(serialize::to_json(bc), "b");
  CHECK(back.eps() == bc.eps());
  CHECK(back.eps0() == bc.eps0());
  CHECK(back.eps_plus() == bc.eps_plus());
}

TEST_CASE("coefficient JSON errors name the field") {
  auto j = serialize::to_json(ComplexCoefficients{});
  j.erase("eps_0");
  try {
    serialize::complex_coefficients_from_json(j, "cfg.coefficients");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg.coefficients.eps_0") != std::string::npos);
  }
  j["eps_0"] = "one";
  CHECK_THROWS_AS(serialize::complex_coefficients_from_json(j, "c"), ConfigError);
}
