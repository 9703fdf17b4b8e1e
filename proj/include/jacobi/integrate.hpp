#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "jacobi/common.hpp"

/// Explicit Runge-Kutta drivers over Eigen vector states.
namespace jacobi::integrate {

/// Uniform output grid t0, t0 + step, ..., t1 (the last interval may be shorter).
struct TimeGrid {
  Real t0 = 0.0;
  Real t1 = 1.0;
  Real step = 1e-3;

  static constexpr Real kMaxSamples = 1e7;

  void validate() const {
    if (!(std::isfinite(t0) && std::isfinite(t1) && std::isfinite(step))) throw ConfigError("grid: non-finite value");
    if (!(t1 > t0)) throw ConfigError("grid: t1 must be greater than t0");
    if (!(step > 0.0)) throw ConfigError("grid.step: must be positive");
    if ((t1 - t0) / step > kMaxSamples) throw ConfigError("grid: more than 1e7 steps");
  }

  int intervals() const {
    const Real ratio = (t1 - t0) / step;
    const Real rounded = std::round(ratio);
    const int n = std::abs(ratio - rounded) < 1e-9 * std::max(1.0, ratio) ? static_cast<int>(rounded)
                                                                           : static_cast<int>(std::ceil(ratio));
    return std::max(n, 1);
  }

  Real time(int i) const { return i >= intervals() ? t1 : t0 + i * step; }
};

enum class Method { RK4, RK45 };

/// Dormand-Prince tolerances; steps are clipped so every grid time is hit.
struct AdaptiveOptions {
  Real abs_tol = 1e-10;
  Real rel_tol = 1e-8;
  Real min_step = 1e-14;
  long max_steps = 100'000'000;
};

template <class State>
using Rhs = std::function<State(Real, const State&)>;

template <class State>
State rk4_step(const Rhs<State>& f, Real t, const State& y, Real h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

template <class State>
Real scaled_error(const State& err, const State& y0, const State& y1, const AdaptiveOptions& o) {
  Real e = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const Real scale = o.abs_tol + o.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    e = std::max(e, std::abs(err[i]) / scale);
  }
  return e;
}

// Dormand-Prince 5(4) step; returns the 5th-order solution and the error estimate.
template <class State>
std::pair<State, State> dopri_step(const Rhs<State>& f, Real t, const State& y, Real h) {
  constexpr Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr Real a21 = 1.0 / 5;
  constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
  constexpr Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

  const State k1 = f(t, y);
  const State k2 = f(t + c2 * h, y + h * (a21 * k1));
  const State k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const State k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const State y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = f(t + h, y1);
  const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {y1, err};
}

}  // namespace detail

/// Integrates y' = f(t, y) from grid.t0 and calls `observe(i, t_i, y_i)` at
/// every grid time, including t0. The observer may throw to abort. Returns
/// the state at grid.t1.
template <class State, class Observer>
State integrate(const Rhs<State>& f, State y, const TimeGrid& grid, Method method, Observer&& observe,
                const AdaptiveOptions& opts = {}) {
  grid.validate();
  const int n = grid.intervals();
  observe(0, grid.t0, y);
  if (method == Method::RK4) {
    for (int i = 1; i <= n; ++i) {
      const Real t = grid.time(i - 1);
      y = rk4_step(f, t, y, grid.time(i) - t);
      observe(i, grid.time(i), y);
    }
    return y;
  }

  Real h = grid.step;
  long taken = 0;
  for (int i = 1; i <= n; ++i) {
    Real t = grid.time(i - 1);
    const Real target = grid.time(i);
    while (t < target) {
      const Real remaining = target - t;
      const bool last = h >= remaining;
      const Real trial = last ? remaining : h;
      auto [y1, err] = detail::dopri_step(f, t, y, trial);
      const Real e = detail::scaled_error(err, y, y1, opts);
      if (!std::isfinite(e)) throw Error("integrate: non-finite state");
      if (e <= 1.0) {
        t = last ? target : t + trial;
        y = std::move(y1);
        if (++taken > opts.max_steps) throw Error("integrate: step budget exhausted");
      }
      const Real factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      const Real proposal = trial * factor;
      // Keep the previous step size after a step clipped to the grid.
      if (!(last && e <= 1.0)) h = proposal;
      if (h < opts.min_step) {
        std::ostringstream msg;
        msg << "integrate: step size underflow at t = " << t;
        throw Error(msg.str());
      }
    }
    observe(i, target, y);
  }
  return y;
}

}  // namespace jacobi::integrate
