#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "ode.hpp"
#include "specfun.hpp"

namespace glance {

using cplx = std::complex<double>;

struct SeriesExpansion {
  double root = 0.0;
  std::vector<double> coeffs;
  double validity_radius = 0.0;

  // x^root * sum c_k x^k
  double value(double x) const {
    double s = 0.0, p = 1.0;
    for (double c : coeffs) s += c * p, p *= x;
    return std::pow(x, root) * s;
  }
  // x d/dx of value
  double log_derivative_form(double x) const {
    double s = 0.0, p = 1.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += (root + double(k)) * coeffs[k] * p, p *= x;
    return std::pow(x, root) * s;
  }
};

inline SeriesExpansion frobenius_coeffs(const ModelParams& params, const Covector& theta, int root_sign, int K) {
  if (K < 3) throw config_error("frobenius_coeffs: K must be >= 3");
  if (root_sign != 1 && root_sign != -1) throw config_error("frobenius_coeffs: root_sign must be +1 or -1");
  SeriesExpansion s;
  s.root = root_sign * params.alpha();
  double tn2 = theta.theta_n * theta.theta_n;
  double a2 = tn2 - theta.prime_norm2();
  s.coeffs.assign(K + 1, 0.0);
  s.coeffs[0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    double den = k * (2.0 * s.root + k);
    if (std::fabs(den) < 1e-12) throw domain_error("frobenius_coeffs: resonant exponent (degenerate Frobenius case)");
    double num = 0.0;
    if (k >= 2) num += a2 * s.coeffs[k - 2];
    if (k >= 3) num += tn2 * s.coeffs[k - 3];
    s.coeffs[k] = -num / den;
  }
  double ck = 0.0;
  for (int k = K; k >= K - 2 && k > 0; --k)
    if (s.coeffs[k] != 0.0) {
      ck = std::pow(1e-16 / std::fabs(s.coeffs[k]), 1.0 / k);
      break;
    }
  s.validity_radius = ck;
  return s;
}

// Series with enough terms that the tail at x is below 1e-16 relative.
inline SeriesExpansion frobenius_series_at(const ModelParams& params, const Covector& theta, int root_sign, double x) {
  int K = 8;
  for (;;) {
    auto s = frobenius_coeffs(params, theta, root_sign, K);
    double tail = 0.0, head = 0.0, p = 1.0;
    for (int k = 0; k <= K; ++k, p *= x) {
      head = std::max(head, std::fabs(s.coeffs[k] * p));
      if (k >= K - 2) tail = std::max(tail, std::fabs(s.coeffs[k] * p));
    }
    if (tail < 1e-17 * head) return s;
    if (K > 4000) throw integration_error("frobenius series does not converge at the handoff point");
    K *= 2;
  }
}

struct SpectralSolution {
  std::vector<double> x_grid;
  std::vector<cplx> values;     // u(x)
  std::vector<cplx> xderiv;     // x u'(x)
  Covector theta;
  cplx normalization{1.0, 0.0};  // x^{-s_minus} u at the first grid point
  Mode mode = Mode::ads;
  double x_min = 1e-3;
  cplx b_over_a{0.0, 0.0};  // weight of the x^{s_plus} branch
};

inline std::vector<double> default_x_grid(double x_lo, double x_max) {
  std::vector<double> g;
  double knee = std::min(0.1, x_max);
  const int nlog = 48;
  for (int i = 0; i < nlog; ++i) g.push_back(x_lo * std::pow(knee / x_lo, double(i) / nlog));
  for (double x = knee; x < x_max - 1e-12; x += 0.025) g.push_back(x);
  g.push_back(x_max);
  return g;
}

namespace detail {

inline void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw config_error("solve_spectral: empty grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i + 1] > grid[i])) throw config_error("solve_spectral: grid must be strictly increasing");
  if (!(grid.front() > 0.0)) throw config_error("solve_spectral: grid must start at x > 0");
}

// Regular Friedlander problem K'' = -q K on the real line, recessive as x -> -inf.
inline SpectralSolution solve_friedlander(const Covector& theta, const std::vector<double>& grid, double tol) {
  double tn = std::fabs(theta.theta_n), tn2 = tn * tn, tp2 = theta.prime_norm2();
  double tn23 = std::cbrt(tn2);
  double zeta0 = (tp2 - tn2) / (tn23 * tn23);
  double u0 = tp2 - tn2;
  double xl = (zeta0 - (std::max(zeta0, 0.0) + 12.0)) / tn23;
  if (u0 > 0.0) {
    // WKB phase from the start point to x = 0 capped at 40
    double L = u0 / tn2 * std::expm1(2.0 / 3.0 * std::log1p(60.0 * tn2 / std::pow(u0, 1.5)));
    xl = std::max(xl, -L);
  }
  double us = u0 - xl * tn2;  // -q at the start point
  auto rhs = [&](double x, const cstate<2>& y) -> cstate<2> {
    double q = (1.0 + x) * tn2 - tp2;
    return {y[1], -q * y[0]};
  };
  StepControl ctl;
  ctl.rtol = tol;
  ctl.atol = 1e-300;
  cstate<2> y{cplx(1.0), cplx(std::sqrt(us) + 0.25 * tn2 / us)};
  StepStats st;
  y = dopri5<2>(rhs, xl, 0.0, y, ctl, &st);
  cstate<2> y0 = y;
  double k0 = std::max(tn23, std::sqrt(std::max(u0, 0.0)));
  double env = std::sqrt(std::norm(y0[0]) + std::norm(y0[1]) / (k0 * k0));
  if (std::abs(y0[0]) < std::max(1e-12, 100.0 * tol) * env) throw pole_error("solve_spectral: friedlander normalization vanishes", zeta0);
  SpectralSolution sol;
  sol.mode = Mode::friedlander;
  sol.theta = theta;
  sol.x_grid = grid;
  sol.x_min = grid.front();
  double x = 0.0;
  for (double xg : grid) {
    ctl.h_init = st.last_h;
    y = dopri5<2>(rhs, x, xg, y, ctl, &st);
    x = xg;
    sol.values.push_back(y[0] / y0[0]);
    sol.xderiv.push_back(xg * y[1] / y0[0]);
  }
  sol.normalization = sol.values.front();
  return sol;
}

inline SpectralSolution solve_ads_positive(const ModelParams& params, const Covector& theta, double x_max,
                                           const std::vector<double>& grid, double tol) {
  const double n = params.n, nu = params.nu(), alpha = params.alpha();
  double tn = std::fabs(theta.theta_n), tn2 = tn * tn, tp2 = theta.prime_norm2();
  double mag = std::sqrt(tn2 + tp2);
  SpectralSolution sol;
  sol.mode = Mode::ads;
  sol.theta = theta;
  sol.x_grid = grid;
  double xmin = std::min({1e-3, 0.5 / std::max(mag, 1e-300), grid.front()});
  sol.x_min = xmin;
  auto V = [&](cplx x) { return nu + x * x * ((1.0 + x) * tn2 - tp2); };

  StepControl ctl;
  ctl.rtol = tol;
  ctl.atol = 1e-300;
  StepStats st;

  // starting point and data (g, x g_x) at a real point x_c
  double xt = tp2 / tn2 - 1.0;  // turning point
  double xc;
  cstate<2> y;  // (g, g_s) in s = log x
  double barrier = xt > x_max ? tn * (2.0 / 3.0) * std::pow(xt - x_max, 1.5) : 0.0;
  if (barrier >= 40.0) {
    xc = x_max;
    double kap = std::sqrt(std::max(-V(xc).real(), 0.0));
    y = {cplx(1.0), cplx(-kap)};
  } else {
    xc = std::max(x_max, xt + 1.0);
    const double beta = -std::numbers::pi / 6.0;
    const cplx eb = std::polar(1.0, beta);
    auto kx = [&](cplx x) { return std::sqrt(V(x)) / x; };
    double r = 0.0, D = 0.0;
    double dr = std::min(0.1, 0.1 / std::abs(kx(cplx(xc))));
    while (D < 40.0) {
      double r1 = r + dr;
      cplx k0 = kx(xc + r * eb), k1 = kx(xc + r1 * eb);
      D += -0.5 * dr * ((k0 * eb).imag() + (k1 * eb).imag());
      r = r1;
      dr = std::min(dr * 1.05, 0.2 / std::max(std::abs(k1), 1e-300) + 0.05 * r);
      if (r > 1e8) throw integration_error("solve_spectral: complex-scaled layer did not reach recessive depth");
    }
    double rmax = r;
    auto crhs = [&](double rr, const cstate<2>& w) -> cstate<2> {
      cplx x = xc + rr * eb;
      return {eb * w[1], eb * (-(x * w[1] + V(x) * w[0]) / (x * x))};
    };
    cplx x_end = xc + rmax * eb;
    cstate<2> w{cplx(1.0), -cplx(0, 1) * kx(x_end)};
    ctl.h_init = std::min(0.1, 0.1 / std::abs(kx(x_end)));
    w = dopri5<2>(crhs, rmax, 0.0, w, ctl, &st);
    y = {w[0], xc * w[1]};
  }

  auto rhs = [&](double s, const cstate<2>& w) -> cstate<2> {
    double x = std::exp(s);
    return {w[1], -V(cplx(x)).real() * w[0]};
  };
  std::vector<cstate<2>> stored(grid.size());
  std::size_t ng = grid.size();
  double s = std::log(xc);
  std::size_t idx = ng;
  ctl.h_init = 0.0;
  while (idx > 0 && grid[idx - 1] > xc) --idx;  // points beyond xc are not produced
  if (idx != ng) throw config_error("solve_spectral: grid extends beyond x_max");
  auto rescale = [&](std::size_t from) {
    double m = std::abs(y[0]) + std::abs(y[1]);
    if (m > 1e100) {
      for (auto& v : y) v /= m;
      for (std::size_t j = from; j < ng; ++j)
        for (auto& v : stored[j]) v /= m;
    }
  };
  while (idx > 0 && grid[idx - 1] >= xmin) {
    double sg = std::log(grid[idx - 1]);
    y = dopri5<2>(rhs, s, sg, y, ctl, &st);
    ctl.h_init = st.last_h;
    s = sg;
    --idx;
    stored[idx] = y;
    rescale(idx);
  }
  if (s > std::log(xmin)) {
    y = dopri5<2>(rhs, s, std::log(xmin), y, ctl, &st);
    rescale(idx);
  }
  auto sm = frobenius_series_at(params, theta, -1, xmin);
  auto sp = frobenius_series_at(params, theta, +1, xmin);
  double gm = sm.value(xmin), gmd = sm.log_derivative_form(xmin);
  double gp = sp.value(xmin), gpd = sp.log_derivative_form(xmin);
  double det = gm * gpd - gp * gmd;
  cplx A = (y[0] * gpd - gp * y[1]) / det;
  cplx B = (gm * y[1] - gmd * y[0]) / det;
  if (std::abs(A) * std::fabs(gm) < 1e-13 * std::abs(y[0]) || A == 0.0)
    throw pole_error("solve_spectral: outgoing solution has no x^{s_minus} component", tn);
  cplx ba = B / A;
  sol.b_over_a = ba;
  for (std::size_t j = 0; j < ng; ++j) {
    double x = grid[j], xn = std::pow(x, 0.5 * n);
    cplx g, gs;
    if (j < idx) {
      g = sm.value(x) + ba * sp.value(x);
      gs = sm.log_derivative_form(x) + ba * sp.log_derivative_form(x);
    } else {
      g = stored[j][0] / A;
      gs = stored[j][1] / A;
    }
    sol.values.push_back(xn * g);
    sol.xderiv.push_back(xn * (0.5 * n * g + gs));
  }
  sol.normalization = sol.values.front() * std::pow(grid.front(), -params.s_minus);
  (void)alpha;
  return sol;
}

}  // namespace detail

inline SpectralSolution solve_spectral(const ModelParams& params, const Covector& theta, double x_max, double tol,
                                       std::vector<double> grid = {}) {
  if (!(tol > 0.0)) throw config_error("solve_spectral: tol must be positive");
  if (!(x_max >= 2.0)) throw config_error("solve_spectral: x_max must be >= 2");
  if (theta.theta_n == 0.0) throw domain_error("solve_spectral: theta_n must be nonzero");
  if (grid.empty()) grid = default_x_grid(1e-3, x_max);
  detail::check_grid(grid);
  if (grid.back() > x_max * (1 + 1e-12)) throw config_error("solve_spectral: grid extends beyond x_max");
  if (params.mode == Mode::friedlander) return detail::solve_friedlander(theta, grid, tol);
  auto sol = detail::solve_ads_positive(params, theta, x_max, grid, tol);
  if (theta.theta_n < 0.0) {
    for (auto& v : sol.values) v = std::conj(v);
    for (auto& v : sol.xderiv) v = std::conj(v);
    sol.normalization = std::conj(sol.normalization);
    sol.b_over_a = std::conj(sol.b_over_a);
  }
  return sol;
}

// Solution of the zero-frequency problem, x^{s_minus}.
inline std::vector<cplx> zero_frequency_row(const ModelParams& params, const std::vector<double>& grid) {
  std::vector<cplx> out;
  for (double x : grid) out.emplace_back(std::pow(x, params.s_minus), 0.0);
  return out;
}

inline cplx friedlander_closed_form(double x, const Covector& theta) {
  if (theta.theta_n == 0.0) throw domain_error("friedlander_closed_form: theta_n must be nonzero");
  if (x < 0.0) throw domain_error("friedlander_closed_form: x must be >= 0");
  double tn2 = theta.theta_n * theta.theta_n;
  double tn23 = std::cbrt(tn2);
  double tp2 = theta.prime_norm2();
  double zeta0 = tp2 / (tn23 * tn23) - tn23;
  double zeta = tp2 / (tn23 * tn23) - (1.0 + x) * tn23;
  double a0 = airy_ai(zeta0).ai;
  if (std::fabs(a0) <= 1e-12) throw pole_error("friedlander_closed_form: Ai(zeta0) vanishes", zeta0);
  return {airy_ai(zeta).ai / a0, 0.0};
}

}  // namespace glance
