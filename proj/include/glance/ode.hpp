#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace glance {

template <std::size_t N>
using cstate = std::array<std::complex<double>, N>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-14;
  double h_init = 0.0;  // 0: pick from the interval length
  long max_steps = 2000000;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double last_h = 0.0;
};

// Dormand-Prince 5(4) from t0 to t1 (either direction). f(t, y) -> dy/dt.
template <std::size_t N, class F>
cstate<N> dopri5(F&& f, double t0, double t1, cstate<N> y, const StepControl& ctl, StepStats* stats = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double span = t1 - t0;
  if (span == 0.0) return y;
  double dir = span > 0 ? 1.0 : -1.0;
  double h = ctl.h_init > 0 ? std::min(ctl.h_init, std::fabs(span)) : std::fabs(span) * 1e-3;
  double t = t0;
  cstate<N> k1 = f(t, y), k2, k3, k4, k5, k6, k7, yt, yn;
  long steps = 0, rej = 0;
  while (dir * (t1 - t) > 0) {
    if (++steps > ctl.max_steps) throw integration_error("dopri5: too many steps");
    bool last = false;
    double hfree = h;
    if (h >= std::fabs(t1 - t)) {
      h = std::fabs(t1 - t);
      last = true;
    }
    double hs = dir * h;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    k2 = f(t + c2 * hs, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * hs, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yn[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(t + hs, yn);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      auto ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (!std::isfinite(err)) throw integration_error("dopri5: non-finite state");
    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y = yn;
      k1 = k7;
      double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = last ? std::max(h * fac, hfree) : h * fac;
    } else {
      ++rej;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-14 * std::max(1.0, std::fabs(t))) throw integration_error("dopri5: step size underflow");
    }
  }
  if (stats) {
    stats->accepted += steps - rej;
    stats->rejected += rej;
    stats->last_h = h;
  }
  return y;
}

// Classical RK4 with fixed step on a real state.
template <std::size_t N, class F>
std::array<double, N> rk4_step(F&& f, double t, const std::array<double, N>& y, double dt) {
  std::array<double, N> k1 = f(t, y), k2, k3, k4, yt;
  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + 0.5 * dt * k1[i];
  k2 = f(t + 0.5 * dt, yt);
  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + 0.5 * dt * k2[i];
  k3 = f(t + 0.5 * dt, yt);
  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + dt * k3[i];
  k4 = f(t + dt, yt);
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

}  // namespace glance
