#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "rays.hpp"

namespace glance {

using cplx = std::complex<double>;

struct OperatorGrid {
  double a = -2.0, b = 10.0;
  std::size_t points = 4096;  // minimum; raised automatically to resolve h when allowed
  bool auto_resolve = true;
  double layer_left = 0.2, layer_right = 0.2;  // fractions of the domain
  double layer_strength = 1.0;
  bool absorbing = true;
};

// -h^2 d^2 + v - 4/9 - iW - i delta on interior nodes of a uniform grid, Dirichlet ends.
struct DiscretizedOperator {
  std::vector<double> sigma;
  std::vector<cplx> diag;
  cplx off{};
  double h = 0.0;
  double step = 0.0;
  ProfileSign sign = ProfileSign::plus;
  double delta = 0.0;

  std::size_t size() const { return sigma.size(); }

  std::vector<cplx> apply(const std::vector<cplx>& v) const {
    std::size_t n = size();
    std::vector<cplx> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = diag[i] * v[i];
      if (i > 0) s += off * v[i - 1];
      if (i + 1 < n) s += off * v[i + 1];
      r[i] = s;
    }
    return r;
  }

  // Thomas algorithm; conj_transpose solves with the adjoint (complex symmetric -> conjugate)
  std::vector<cplx> solve(const std::vector<cplx>& f, bool adjoint = false) const {
    std::size_t n = size();
    if (f.size() != n) throw config_error("solve: size mismatch");
    std::vector<cplx> c(n), d(n);
    cplx o = adjoint ? std::conj(off) : off;
    auto dg = [&](std::size_t i) { return adjoint ? std::conj(diag[i]) : diag[i]; };
    cplx den = dg(0);
    if (std::abs(den) == 0.0) throw integration_error("solve: zero pivot");
    c[0] = o / den;
    d[0] = f[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
      den = dg(i) - o * c[i - 1];
      if (std::abs(den) == 0.0) throw integration_error("solve: zero pivot");
      c[i] = o / den;
      d[i] = (f[i] - o * d[i - 1]) / den;
    }
    std::vector<cplx> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }
};

inline double absorbing_weight(double s, const OperatorGrid& g) {
  if (!g.absorbing) return 0.0;
  double L = g.b - g.a;
  double wl = g.layer_left * L, wr = g.layer_right * L;
  double u = 0.0;
  if (wl > 0 && s < g.a + wl) u = (g.a + wl - s) / wl;
  if (wr > 0 && s > g.b - wr) u = (s - (g.b - wr)) / wr;
  return g.layer_strength * u * u;
}

inline DiscretizedOperator build_global_operator(ProfileSign sign, double h, OperatorGrid grid,
                                                 const ExtendedProfile* profile = nullptr) {
  if (!(h > 0.0)) throw domain_error("build_global_operator: h must be positive");
  if (!(grid.b > grid.a)) throw config_error("build_global_operator: empty domain");
  if (grid.layer_left < 0 || grid.layer_right < 0 || grid.layer_left > 0.2 + 1e-12 || grid.layer_right > 0.2 + 1e-12)
    throw config_error("build_global_operator: absorbing layers must cover at most 20% per end");
  double L = grid.b - grid.a;
  std::size_t need = std::size_t(std::ceil(L / (h / 10.0))) + 1;
  if (grid.auto_resolve && grid.points < need) grid.points = need;
  double dx = L / double(grid.points - 1);
  if (dx > h / 10.0 * (1 + 1e-12)) throw config_error("build_global_operator: grid step exceeds h/10");
  ExtendedProfile local(sign);
  const ExtendedProfile& v = profile ? *profile : local;
  DiscretizedOperator op;
  op.h = h;
  op.step = dx;
  op.sign = sign;
  op.delta = h * h * 1e-3;
  op.off = -h * h / (dx * dx);
  for (std::size_t i = 1; i + 1 < grid.points; ++i) {
    double s = grid.a + dx * double(i);
    op.sigma.push_back(s);
    op.diag.emplace_back(2.0 * h * h / (dx * dx) + v.value(s) - 4.0 / 9.0, -absorbing_weight(s, grid) - op.delta);
  }
  return op;
}

struct NormEstimate {
  double norm = 0.0;
  int iterations = 0;
};

// largest singular value of <s>^{-w} A^{-1} <s>^{-w}, w = 1/2 + eps
inline NormEstimate weighted_resolvent_norm(const DiscretizedOperator& op, double eps, double rtol = 1e-9,
                                            int max_iter = 20000) {
  if (!(eps > 0.0)) throw domain_error("weighted_resolvent_norm: epsilon must be positive");
  std::size_t n = op.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(1.0 + op.sigma[i] * op.sigma[i], -0.5 * (0.5 + eps));
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {nd(rng), nd(rng)};
  auto normalize = [](std::vector<cplx>& x) {
    double s = 0;
    for (auto& y : x) s += std::norm(y);
    s = std::sqrt(s);
    for (auto& y : x) y /= s;
    return s;
  };
  normalize(v);
  double prev = 0.0;
  NormEstimate est;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<cplx> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = w[i] * v[i];
    t = op.solve(t);
    for (std::size_t i = 0; i < n; ++i) t[i] *= w[i];
    for (std::size_t i = 0; i < n; ++i) t[i] *= w[i];
    t = op.solve(t, true);
    for (std::size_t i = 0; i < n; ++i) t[i] *= w[i];
    double lam = normalize(t);
    v = std::move(t);
    est.norm = std::sqrt(lam);
    est.iterations = it;
    if (it > 5 && std::fabs(lam - prev) <= rtol * lam) return est;
    prev = lam;
  }
  throw integration_error("weighted_resolvent_norm: power iteration did not converge");
}

struct ScanResult {
  std::vector<double> h;
  std::vector<double> norm;
  std::vector<int> iterations;
  std::vector<std::size_t> points;
  double exponent = 0.0;
  double r2 = 0.0;
};

inline ScanResult resolvent_norm_scan(const std::vector<double>& h_list, double eps,
                                      ProfileSign sign = ProfileSign::plus, OperatorGrid grid = {}) {
  if (h_list.size() < 4) throw config_error("resolvent_norm_scan: need at least 4 h values");
  for (std::size_t i = 0; i + 1 < h_list.size(); ++i)
    if (std::fabs(h_list[i] / h_list[i + 1] - 2.0) > 1e-9)
      throw config_error("resolvent_norm_scan: h list must be geometric with ratio 2");
  ScanResult r;
  std::vector<double> lh, ln;
  for (double h : h_list) {
    auto op = build_global_operator(sign, h, grid);
    auto est = weighted_resolvent_norm(op, eps);
    r.h.push_back(h);
    r.norm.push_back(est.norm);
    r.iterations.push_back(est.iterations);
    r.points.push_back(op.size() + 2);
    lh.push_back(std::log(h));
    ln.push_back(std::log(est.norm));
  }
  auto f = fit_line(lh, ln);
  r.exponent = f.slope;
  r.r2 = f.r2;
  return r;
}

}  // namespace glance
