#include <doctest.h>

#include <vector>

#include "jacobi/integrate.hpp"

using namespace jacobi;
using integrate::AdaptiveOptions;
using integrate::Method;
using integrate::Rhs;
using integrate::TimeGrid;

namespace {

const auto ignore = [](int, Real, const RVector&) {};

// y' = 1 + y^2, y(0) = 0: y = tan t.
const Rhs<RVector> tangent = [](Real, const RVector& y) { return RVector((1.0 + y.array().square()).matrix()); };

Real tangent_error(Method m, Real step) {
  RVector y = RVector::Zero(1);
  y = integrate::integrate(tangent, y, {0.0, 1.0, step}, m, ignore);
  return std::abs(y[0] - std::tan(1.0));
}

}  // namespace

TEST_CASE("grid") {
  CHECK(TimeGrid{0.0, 1.0, 0.25}.intervals() == 4);
  CHECK(TimeGrid{0.0, 1.0, 0.3}.intervals() == 4);
  CHECK(TimeGrid{0.0, 1.0, 0.3}.time(4) == 1.0);
  CHECK(TimeGrid{0.0, 5.0, 1e-3}.intervals() == 5000);
  CHECK(TimeGrid{0.0, 5.0, 1e-3}.time(5000) == 5.0);
  CHECK_THROWS_AS(TimeGrid({1.0, 1.0, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0, -0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(TimeGrid({0.0, 1e3, 1e-6}).validate(), ConfigError);
  CHECK_THROWS_AS(TimeGrid({0.0, std::nan(""), 0.1}).validate(), ConfigError);
}

TEST_CASE("observer sees every grid time") {
  for (const Method m : {Method::RK4, Method::RK45}) {
    std::vector<Real> times;
    RVector y = RVector::Zero(1);
    integrate::integrate(tangent, y, {0.0, 1.0, 0.3}, m, [&](int i, Real t, const RVector&) {
      CHECK(i == static_cast<int>(times.size()));
      times.push_back(t);
    });
    REQUIRE(times.size() == 5);
    CHECK(times.front() == 0.0);
    CHECK(times[2] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(times.back() == 1.0);
  }
}

TEST_CASE("zero right-hand side leaves the state unchanged") {
  const Rhs<RVector> zero = [](Real, const RVector& y) { return RVector(RVector::Zero(y.size())); };
  RVector y(3);
  y << 1.0, -2.0, 0.5;
  for (const Method m : {Method::RK4, Method::RK45}) CHECK(integrate::integrate(zero, y, {0.0, 10.0, 0.1}, m, ignore) == y);
}

TEST_CASE("RK4 is fourth order") {
  // y' = -y^2, y(0) = 1: y(1) = 1/2.
  const Rhs<RVector> decay = [](Real, const RVector& y) { return RVector((-y.array().square()).matrix()); };
  auto err = [&](Real step) {
    RVector y = RVector::Ones(1);
    y = integrate::integrate(decay, y, {0.0, 1.0, step}, Method::RK4, ignore);
    return std::abs(y[0] - 0.5);
  };
  CHECK(err(0.05) / err(0.025) == doctest::Approx(16.0).epsilon(0.05));
  CHECK(err(0.025) / err(0.0125) == doctest::Approx(16.0).epsilon(0.05));
  CHECK(tangent_error(Method::RK4, 1e-3) < 1e-11);
}

TEST_CASE("RK45 meets its tolerance") {
  CHECK(tangent_error(Method::RK45, 0.1) < 1e-8);
  RVector y = RVector::Zero(1);
  const AdaptiveOptions tight{1e-13, 1e-13};
  y = integrate::integrate(tangent, y, {0.0, 1.0, 0.5}, Method::RK45, ignore, tight);
  CHECK(std::abs(y[0] - std::tan(1.0)) < 1e-11);
}

TEST_CASE("complex states and time-dependent right-hand sides") {
  // y' = i t y: y = exp(i t^2 / 2).
  const Rhs<CVector> f = [](Real t, const CVector& y) { return CVector(Complex(0.0, t) * y); };
  CVector y = CVector::Ones(1);
  y = integrate::integrate(f, y, {0.0, 2.0, 1e-3}, Method::RK4, [](int, Real, const CVector&) {});
  CHECK(std::abs(y[0] - std::exp(Complex(0.0, 2.0))) < 1e-11);
}

TEST_CASE("blow-up is reported") {
  RVector y = RVector::Zero(1);
  CHECK_THROWS_AS(integrate::integrate(tangent, y, {0.0, 2.0, 0.1}, Method::RK45, ignore), Error);
}

TEST_CASE("observer may abort") {
  RVector y = RVector::Zero(1);
  CHECK_THROWS_AS(integrate::integrate(tangent, y, {0.0, 1.0, 0.1}, Method::RK4,
                            [](int i, Real, const RVector&) {
                              if (i == 3) throw DomainError("stop");
                            }),
                  DomainError);
}
