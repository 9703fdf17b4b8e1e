#include <doctest.h>

#include <random>

#include "jacobi/geometry.hpp"
#include "jacobi/serialize.hpp"

using namespace jacobi;
using namespace jacobi::geometry;

namespace {

// Random symmetric W with operator norm r < 1.
CMatrix random_ball_point(std::mt19937_64& rng, int n, double r) {
  std::normal_distribution<double> d;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {d(rng), d(rng)};
  CMatrix s = 0.5 * (a + a.transpose());
  const double norm = Eigen::JacobiSVD<CMatrix>(s).singularValues()(0);
  return s * (r / norm);
}

CVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = {d(rng), d(rng)};
  return v;
}

}  // namespace

TEST_CASE("ball membership") {
  CHECK(ball_membership(CMatrix::Zero(2, 2)).inside);
  CMatrix one(1, 1);
  one << 1.0;
  CHECK_FALSE(ball_membership(one).inside);
  CMatrix diag = CMatrix::Zero(2, 2);
  diag(0, 0) = diag(1, 1) = 0.9;
  const Membership m = ball_membership(diag);
  CHECK(m.inside);
  CHECK(m.min_eigenvalue == doctest::Approx(0.19).epsilon(1e-12));
  CMatrix asym = diag;
  asym(0, 1) = 0.1;
  CHECK_FALSE(ball_membership(asym).inside);
  CHECK(ball_membership(asym).symmetry_residual == doctest::Approx(0.1));
}

TEST_CASE("points validate on construction") {
  CHECK_THROWS_AS(DiskPoint(Complex(0.6, 0.8)), DomainError);
  CHECK_NOTHROW(DiskPoint(Complex(0.6, 0.79)));
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(BallPoint{bad}, DomainError);
  CHECK(BallPoint::disk(Complex(0.3, 0.4)).margin() == doctest::Approx(0.75));
  CHECK_THROWS_AS(BargmannIndex(0.0), DomainError);
  CHECK(BargmannIndex(1.0).discrete_series());
  CHECK(BargmannIndex(1.5).discrete_series());
  CHECK_FALSE(BargmannIndex(0.25).discrete_series());
}

TEST_CASE("FC transform examples") {
  CHECK(fc_forward(Complex(1.0), Complex(0.5)) == Complex(0.5));
  CHECK(std::abs(fc_inverse(Complex(0.5), Complex(0.5)) - 1.0) < 1e-15);
  const Complex eta(0.3, -1.2);
  CHECK(fc_forward(eta, 0.0) == eta);
  CHECK(fc_inverse(eta, 0.0) == eta);
}

TEST_CASE("FC transform round trips for n = 1, 2, 3") {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix W = random_ball_point(rng, n, 0.9);
      const CVector eta = random_vector(rng, n);
      const CVector z = fc_forward(eta, W);
      CHECK((fc_inverse(z, W) - eta).norm() < 1e-12);
      CHECK((fc_forward(fc_inverse(z, W), W) - z).norm() < 1e-12);
      const FCPoint p{eta, BallPoint(W)};
      const JacobiPoint q = fc_forward(p);
      CHECK((fc_inverse(q).eta - eta).norm() < 1e-12);
    }
  }
}

TEST_CASE("disk parametrization") {
  const DiskParam z = disk_param(0.0);
  CHECK(z.w == Complex(0.0));
  CHECK(z.rho == 0.0);
  const DiskParam one = disk_param(1.0);
  CHECK(std::abs(one.w - std::tanh(1.0)) < 1e-15);
  CHECK(one.rho == doctest::Approx(std::log(1.0 - std::tanh(1.0) * std::tanh(1.0))).epsilon(1e-14));
  const Complex zc(-0.7, 2.1);
  CHECK(std::arg(disk_param(zc).w) == doctest::Approx(std::arg(zc)).epsilon(1e-14));
  double prev = 0.0;
  for (double r = 0.1; r < 20.0; r += 0.1) {
    const double m = std::abs(disk_param(std::polar(r, 0.4)).w);
    CHECK(m < 1.0);
    CHECK(m >= prev);
    prev = m;
  }
  const DiskParam far = disk_param(std::polar(1e3, 2.0));
  CHECK(std::norm(far.w) < 1.0);
  CHECK(far.rho == doctest::Approx(-2.0 * (1e3 - std::log(2.0))));
}

TEST_CASE("overlap exponent: both forms agree under z = eta - w conj(eta)") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex eta(2 * u(rng), 2 * u(rng));
    Complex w(u(rng), u(rng));
    if (std::abs(w) >= 0.95) w *= 0.95 / std::abs(w);
    const Complex z = fc_forward(eta, w);
    CHECK(std::abs(overlap_exponent(z, w) - overlap_exponent_fc(eta, w)) < 1e-12 * (1 + std::abs(overlap_exponent(z, w))));
  }
}

TEST_CASE("overlap log examples") {
  CHECK(overlap_log(0.0, 0.0, BargmannIndex(1.0)) == 0.0);
  CHECK(overlap_log(0.0, 0.5, BargmannIndex(1.0)) == doctest::Approx(-2.0 * std::log(0.75)).epsilon(1e-15));
  // w = 0: <e_z, e_z> = exp(|z|^2)
  CHECK(overlap_log(Complex(0.6, 0.8), 0.0, BargmannIndex(0.75)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(overlap_log(0.0, 1.0, BargmannIndex(1.0)), DomainError);
}

TEST_CASE("Kahler metric") {
  const BargmannIndex k1(1.0);
  const auto g0 = kahler_metric(0.0, 0.0, k1);
  CHECK(std::abs(g0(0, 0) - 1.0) < 1e-6);
  CHECK(std::abs(g0(0, 1)) < 1e-6);
  // w-w entry at the origin: d^2/dw dw* of -2k ln(1 - |w|^2) = 2k
  CHECK(std::abs(g0(1, 1) - 2.0) < 1e-6);

  const BargmannIndex k(0.75);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const Complex z(-1.0 + 0.2 * i, 0.5 - 0.1 * j);
      const Complex w = std::polar(0.08 * (i + 1) * 0.9, 0.6 * j);
      const Eigen::Matrix2cd g = kahler_metric(z, w, k);
      CHECK((g - g.adjoint()).norm() < 1e-8);
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(0.5 * (g + g.adjoint())).eigenvalues();
      CHECK(ev.minCoeff() > 0.0);
    }
}

TEST_CASE("Kahler metric near the boundary refuses") {
  CHECK_THROWS_AS(kahler_metric(0.0, Complex(1.0 - 1e-7, 0.0), BargmannIndex(1.0)), DomainError);
}

TEST_CASE("point JSON") {
  CVector eta(2);
  eta << Complex(0.1, 0.2), Complex(-0.3, 0.4);
  CMatrix W = CMatrix::Zero(2, 2);
  W(0, 1) = W(1, 0) = Complex(0.1, -0.1);
  const auto j = serialize::to_json(FCPoint{eta, BallPoint(W)});
  CHECK(j["eta"][1][0].get<double>() == -0.3);
  CHECK(j["W"][0][1][1].get<double>() == -0.1);
  CHECK(serialize::vector_from_json(j["eta"], "eta") == eta);
  CHECK(serialize::matrix_from_json(j["W"], "W") == W);
  CHECK_THROWS_AS(serialize::matrix_from_json(serialize::Json::parse("[[[1,0],[0,0]]]"), "W"), ConfigError);
}
