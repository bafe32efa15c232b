#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "specfun.hpp"

namespace glance {

using cplx = std::complex<double>;

// Samples on a log-uniform grid of (0, inf).
struct HalfLineFunction {
  std::vector<double> t;
  std::vector<cplx> values;
  double exponent_at_zero = 0.0;
  double exponent_at_infinity = 0.0;

  double log_step() const { return std::log(t[1] / t[0]); }
};

inline HalfLineFunction sample_half_line(const std::function<cplx(double)>& f, double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 16) throw config_error("sample_half_line: bad grid");
  HalfLineFunction h;
  h.t = log_grid(lo, hi, n);
  for (double x : h.t) h.values.push_back(f(x));
  return h;
}

// Samples on a uniform grid of a real interval.
struct LineFunction {
  double z0 = 0.0, dz = 1.0;
  std::vector<cplx> values;
  double at(std::size_t i) const { return z0 + dz * double(i); }
};

inline LineFunction sample_line(const std::function<cplx(double)>& f, double a, double b, std::size_t n) {
  if (!(b > a) || n < 16) throw config_error("sample_line: bad grid");
  LineFunction g;
  g.z0 = a;
  g.dz = (b - a) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) g.values.push_back(f(g.at(i)));
  return g;
}

namespace detail {

inline void require_uniform_log(const HalfLineFunction& f, const char* who) {
  if (f.t.size() < 16 || f.values.size() != f.t.size()) throw config_error(std::string(who) + ": bad grid");
  double dw = f.log_step();
  for (std::size_t i = 1; i < f.t.size(); ++i)
    if (std::fabs(std::log(f.t[i] / f.t[i - 1]) - dw) > 1e-9 * std::max(1.0, dw))
      throw config_error(std::string(who) + ": grid must be log-uniform");
}

inline void require_decay(const std::vector<cplx>& v, const char* who) {
  double m = 0.0;
  for (auto& x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return;
  const std::size_t k = std::min<std::size_t>(3, v.size());
  for (std::size_t i = 0; i < k; ++i)
    if (std::abs(v[i]) > 1e-12 * m || std::abs(v[v.size() - 1 - i]) > 1e-12 * m)
      throw domain_error(std::string(who) + ": input must decay rapidly at both ends of the grid");
}

}  // namespace detail

// ((x d_x)^2 - alpha) u = f via the Green's function in w = log x.
inline HalfLineFunction mellin_solve(const HalfLineFunction& f, double alpha) {
  if (!(alpha > 0.0)) throw domain_error("mellin_solve: alpha must be positive");
  detail::require_uniform_log(f, "mellin_solve");
  detail::require_decay(f.values, "mellin_solve");
  double r = std::sqrt(alpha), dw = f.log_step();
  auto L = exp_kernel_left(f.values, dw, r);
  auto R = exp_kernel_right(f.values, dw, r);
  HalfLineFunction u;
  u.t = f.t;
  u.exponent_at_zero = r;
  u.exponent_at_infinity = -r;
  u.values.resize(f.t.size());
  for (std::size_t i = 0; i < f.t.size(); ++i) u.values[i] = -(L[i] + R[i]) / (2.0 * r);
  return u;
}

// Same problem through the Mellin transform on Im s = 0:
// u(x) = (1/2pi) int x^{-is} (-Mf(s)) / (s^2 + alpha) ds, Mf(s) = int f x^{is} dx/x.
inline HalfLineFunction mellin_solve_contour(const HalfLineFunction& f, double alpha, double s_max = 40.0,
                                             double ds = 0.05) {
  if (!(alpha > 0.0)) throw domain_error("mellin_solve_contour: alpha must be positive");
  detail::require_uniform_log(f, "mellin_solve_contour");
  detail::require_decay(f.values, "mellin_solve_contour");
  std::size_t nw = f.t.size();
  double dw = f.log_step(), w0 = std::log(f.t[0]);
  long ns = long(std::ceil(s_max / ds));
  std::vector<cplx> Mf(2 * ns + 1);
  std::size_t lo = 0, hi = nw;
  double m = 0.0;
  for (auto& v : f.values) m = std::max(m, std::abs(v));
  while (lo < nw && std::abs(f.values[lo]) < 1e-18 * m) ++lo;
  while (hi > lo && std::abs(f.values[hi - 1]) < 1e-18 * m) --hi;
  for (long k = -ns; k <= ns; ++k) {
    double s = k * ds;
    cplx acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += f.values[i] * std::polar(1.0, s * (w0 + dw * double(i)));
    Mf[k + ns] = acc * dw;
  }
  HalfLineFunction u;
  u.t = f.t;
  u.exponent_at_zero = std::sqrt(alpha);
  u.exponent_at_infinity = -std::sqrt(alpha);
  u.values.assign(nw, cplx{});
  for (long k = -ns; k <= ns; ++k) {
    double s = k * ds;
    cplx c = -Mf[k + ns] / (s * s + alpha) * (ds / (2.0 * std::numbers::pi));
    if (std::abs(c) == 0.0) continue;
    cplx rot = std::polar(1.0, -s * dw), ph = std::polar(1.0, -s * w0);
    for (std::size_t i = 0; i < nw; ++i) {
      if (i % 512 == 0) ph = std::polar(1.0, -s * (w0 + dw * double(i)));
      u.values[i] += c * ph;
      ph *= rot;
    }
  }
  return u;
}

struct MellinResidues {
  cplx at_zero;      // u ~ at_zero * x^{sqrt(alpha)} as x -> 0
  cplx at_infinity;  // u ~ at_infinity * x^{-sqrt(alpha)} as x -> inf
};

// Residues at s = +-i sqrt(alpha) picked up when shifting the contour.
inline MellinResidues mellin_residues(const HalfLineFunction& f, double alpha) {
  if (!(alpha > 0.0)) throw domain_error("mellin_residues: alpha must be positive");
  detail::require_uniform_log(f, "mellin_residues");
  double r = std::sqrt(alpha), dw = f.log_step();
  std::vector<cplx> a(f.t.size()), b(f.t.size());
  for (std::size_t i = 0; i < f.t.size(); ++i) {
    a[i] = f.values[i] * std::pow(f.t[i], -r);
    b[i] = f.values[i] * std::pow(f.t[i], r);
  }
  auto A = cumulative_integral6(a, dw);
  auto B = cumulative_integral6(b, dw);
  return {-A.back() / (2.0 * r), -B.back() / (2.0 * r)};
}

struct LayerSolution {
  HalfLineFunction u;
  cplx c_far{};   // u = c_far * H2(t) (or K(t)) beyond the support of f
  cplx c_near{};  // u = c_near * J(t) (or I(t)) below the support of f
  double alpha = 0.0;
  bool outgoing = true;

  // value anywhere outside the sampled support of f
  cplx evaluate_outside(double t) const {
    if (t >= u.t.back()) {
      if (outgoing) return c_far * hankel_pair(alpha, t).h2;
      return c_far * macdonald(alpha, t);
    }
    if (t <= u.t.front()) {
      auto jy = detail::bessel_jy(alpha, t);
      if (outgoing) return c_near * jy.j;
      return c_near * detail::bessel_ik_scaled(alpha, t).i * std::exp(t);
    }
    throw domain_error("evaluate_outside: point lies inside the sampled range");
  }
};

// [(t d_t)^2 - alpha^2 + t^2] u = f, regular (t^alpha) at 0 and outgoing (H2) at infinity:
// u = (i pi/2) [J(t) int_t^inf H2 f ds/s + H2(t) int_0^t J f ds/s].
inline LayerSolution bessel_layer_solve(const HalfLineFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 5.0)) throw range_error("bessel_layer_solve: alpha outside (0, 5]");
  detail::require_uniform_log(f, "bessel_layer_solve");
  detail::require_decay(f.values, "bessel_layer_solve");
  std::size_t n = f.t.size();
  double dw = f.log_step();
  std::vector<cplx> jf(n), hf(n), J(n), H2(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto h = hankel_pair(alpha, f.t[i]);
    J[i] = h.h1.real();
    H2[i] = h.h2;
    jf[i] = J[i] * f.values[i];
    hf[i] = H2[i] * f.values[i];
  }
  auto B = cumulative_integral6(jf, dw);
  auto A = cumulative_integral6(hf, dw);
  const cplx ipi2(0.0, 0.5 * std::numbers::pi);
  LayerSolution s;
  s.alpha = alpha;
  s.outgoing = true;
  s.u.t = f.t;
  s.u.exponent_at_zero = alpha;
  s.u.exponent_at_infinity = -0.5;
  s.u.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.u.values[i] = ipi2 * (J[i] * (A.back() - A[i]) + H2[i] * B[i]);
  s.c_far = ipi2 * B.back();
  s.c_near = ipi2 * A.back();
  return s;
}

// [(t d_t)^2 - alpha^2 - t^2] u = f, regular at 0 and decaying at infinity:
// u = -[I(t) int_t^inf K f ds/s + K(t) int_0^t I f ds/s].
inline LayerSolution elliptic_layer_solve(const HalfLineFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 5.0)) throw range_error("elliptic_layer_solve: alpha outside (0, 5]");
  detail::require_uniform_log(f, "elliptic_layer_solve");
  detail::require_decay(f.values, "elliptic_layer_solve");
  if (f.t.back() > 600.0) throw range_error("elliptic_layer_solve: grid beyond t = 600");
  std::size_t n = f.t.size();
  double dw = f.log_step();
  std::vector<cplx> kf(n), if_(n);
  std::vector<double> I(n), K(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = detail::bessel_ik_scaled(alpha, f.t[i]);
    I[i] = v.i * std::exp(f.t[i]);
    K[i] = v.k * std::exp(-f.t[i]);
    kf[i] = K[i] * f.values[i];
    if_[i] = I[i] * f.values[i];
  }
  auto A = cumulative_integral6(kf, dw);
  auto B = cumulative_integral6(if_, dw);
  LayerSolution s;
  s.alpha = alpha;
  s.outgoing = false;
  s.u.t = f.t;
  s.u.exponent_at_zero = alpha;
  s.u.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.u.values[i] = -(I[i] * (A.back() - A[i]) + K[i] * B[i]);
  s.c_far = -B.back();
  s.c_near = -A.back();
  return s;
}

namespace detail {

inline void require_compact(const LineFunction& f, const char* who) {
  if (f.values.size() < 16) throw config_error(std::string(who) + ": grid too coarse");
  require_decay(f.values, who);
}

}  // namespace detail

struct LineSolution {
  LineFunction u;
  cplx c_right{}, c_left{};  // far-field amplitudes
};

// (d^2 + mu) u = f with kernel exp(-i sqrt(mu) |s|) / (-2i sqrt(mu))
inline LineSolution free_outgoing_resolvent(const LineFunction& f, double mu) {
  if (!(mu > 0.0)) throw domain_error("free_outgoing_resolvent: mu must be positive (use the decaying resolvent)");
  detail::require_compact(f, "free_outgoing_resolvent");
  double k = std::sqrt(mu);
  const cplx ik(0.0, k);
  auto L = exp_kernel_left(f.values, f.dz, ik);
  auto R = exp_kernel_right(f.values, f.dz, ik);
  LineSolution s;
  s.u.z0 = f.z0;
  s.u.dz = f.dz;
  s.u.values.resize(f.values.size());
  cplx pref = 1.0 / (-2.0 * ik);
  for (std::size_t i = 0; i < f.values.size(); ++i) s.u.values[i] = pref * (L[i] + R[i]);
  // u = c_right e^{-ikZ} to the right, c_left e^{ikZ} to the left
  std::size_t n = f.values.size();
  s.c_right = pref * L[n - 1] * std::exp(ik * f.at(n - 1));
  s.c_left = pref * R[0] * std::exp(-ik * f.at(0));
  return s;
}

// (d^2 - kappa^2) u = f with kernel -exp(-kappa |s|) / (2 kappa)
inline LineSolution free_decaying_resolvent(const LineFunction& f, double kappa2) {
  if (!(kappa2 > 0.0)) throw domain_error("free_decaying_resolvent: kappa^2 must be positive");
  detail::require_compact(f, "free_decaying_resolvent");
  double kap = std::sqrt(kappa2);
  auto L = exp_kernel_left(f.values, f.dz, kap);
  auto R = exp_kernel_right(f.values, f.dz, kap);
  LineSolution s;
  s.u.z0 = f.z0;
  s.u.dz = f.dz;
  s.u.values.resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) s.u.values[i] = -(L[i] + R[i]) / (2.0 * kap);
  return s;
}

}  // namespace glance
