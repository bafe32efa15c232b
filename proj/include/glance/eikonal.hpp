#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "frobenius.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace glance {

enum class PhaseKind { in, out, limit, tilde };

// in/out depend on (z, z'), limit and tilde on z alone; sgn is sgn(theta_n)
inline double phase_value(PhaseKind kind, double z, double z_prime, double h, int sgn = 1) {
  if (!(h > 0.0)) throw domain_error("phase_value: h must be positive");
  if (z < 0.0 || z_prime < 0.0) throw domain_error("phase_value: z, z' must be >= 0");
  double s = sgn < 0 ? -1.0 : 1.0;
  switch (kind) {
    case PhaseKind::in:
      return s * (2.0 / 3.0) / h * std::fabs(std::pow(z + 1.0, 1.5) - std::pow(z_prime + 1.0, 1.5));
    case PhaseKind::out:
      return s * (2.0 / 3.0) / h * (std::pow(z + 1.0, 1.5) + std::pow(z_prime + 1.0, 1.5) - 2.0);
    case PhaseKind::limit:
      return s * (2.0 / 3.0) * (std::pow(z + 1.0, 1.5) - 1.0);
    case PhaseKind::tilde:
      if (z > 1.0) throw domain_error("phase_value: tilde phase needs z <= 1");
      return s * (2.0 / 3.0) * (1.0 - std::pow(1.0 - z, 1.5));
  }
  return 0.0;
}

// -(z phi')^2 + z^3 + z^2 with phi' supplied
inline double eikonal_residual_from_derivative(double dphi, double z) {
  return -(z * dphi) * (z * dphi) + z * z * z + z * z;
}

// analytic form for the limit phase, optionally sign-flipped
inline double eikonal_residual_limit(double z, int sgn = 1) {
  double d = (sgn < 0 ? -1.0 : 1.0) * std::sqrt(z + 1.0);
  // (z sqrt(z+1))^2 = z^3 + z^2 expanded so cancellation is exact
  double zd = z * d;
  return std::fma(-zd, zd, z * z * z + z * z);
}

// finite-difference derivative (sixth order) for arbitrary phase samples
inline double eikonal_residual(const std::function<double(double)>& phi, double z, double step = 1e-3) {
  double d = (-phi(z - 3 * step) + 9 * phi(z - 2 * step) - 45 * phi(z - step) + 45 * phi(z + step) -
              9 * phi(z + 2 * step) + phi(z + 3 * step)) / (60.0 * step);
  return eikonal_residual_from_derivative(d, z);
}

struct TransportTerm {
  int j = 0;
  std::vector<double> sigma;  // log-uniform
  std::vector<cplx> u;
  double b = 1.0;
};

enum class TransportAnchor { origin, infinity };

struct TransportParams {
  double b = 1.0;
  double nu = -0.16;  // lambda - n^2/4
  double sigma_lo = 1e-3;
  double sigma_hi = 1e5;
  std::size_t points = 8192;
};

inline TransportParams transport_params(const ModelParams& p) {
  TransportParams t;
  t.nu = p.nu();
  return t;
}

inline std::vector<double> transport_grid(const TransportParams& tp) {
  if (tp.points < 16) throw config_error("transport grid needs at least 16 points");
  return log_grid(tp.sigma_lo, tp.sigma_hi, tp.points);
}

// sigma d/dsigma of the limit phase
inline double sigma_dphi(double sigma) {
  double s23 = std::cbrt(sigma * sigma);
  return (2.0 / 3.0) * s23 * std::sqrt(s23 + 1.0);
}

// homogeneous solution of the order-zero transport operator
inline double transport_homogeneous(double sigma, double b = 1.0) {
  return std::pow(sigma, -0.5 * b + 1.0 / 6.0) * std::pow(std::cbrt(sigma * sigma) + 1.0, -0.25);
}

// Solves 2i sigma phi' [sigma d_sigma - (1/6)(sigma^{2/3}+1)^{-1} + b/2] u_j
//        = e_j - [(sigma d_sigma)^2 + (b-1) sigma d_sigma + (4/9) nu] u_{j-1}.
// anchor: origin -> u_j vanishes at the left edge; infinity -> u_j has no homogeneous tail.
inline TransportTerm transport_solve(int j, const std::vector<cplx>& e, const TransportTerm* prev,
                                     const TransportParams& tp, std::optional<TransportAnchor> anchor = {}) {
  if (j < 0) throw domain_error("transport_solve: order must be >= 0");
  if (j > 0 && !prev) throw domain_error("transport_solve: order j > 0 needs the previous term");
  auto sig = transport_grid(tp);
  std::size_t N = sig.size();
  if (!e.empty() && e.size() != N) throw config_error("transport_solve: rhs size does not match the sigma grid");
  if (prev && prev->u.size() != N) throw config_error("transport_solve: previous term on a different grid");
  if (!e.empty()) {
    double m = 0.0;
    for (auto& v : e) m = std::max(m, std::abs(v));
    double edge = std::max(std::abs(e.front()), std::abs(e.back()));
    if (m > 0.0 && edge > 1e-12 * m) throw domain_error("transport_solve: rhs does not decay at the grid ends");
  }
  TransportAnchor anc = anchor.value_or(j == 0 ? TransportAnchor::origin : TransportAnchor::infinity);
  double dw = std::log(sig[1] / sig[0]);
  std::vector<cplx> rhs(N, cplx{});
  if (!e.empty()) rhs = e;
  if (prev) {
    auto d1 = diff1(prev->u, dw);
    auto d2 = diff2(prev->u, dw);
    for (std::size_t i = 0; i < N; ++i)
      rhs[i] -= d2[i] + (tp.b - 1.0) * d1[i] + (4.0 / 9.0) * tp.nu * prev->u[i];
  }
  const cplx I(0.0, 1.0);
  std::vector<cplx> integrand(N);
  std::vector<double> g(N);
  for (std::size_t i = 0; i < N; ++i) {
    g[i] = transport_homogeneous(sig[i], tp.b);
    integrand[i] = rhs[i] / (2.0 * I * sigma_dphi(sig[i])) / g[i];
  }
  auto F = cumulative_integral(integrand, dw);
  TransportTerm out;
  out.j = j;
  out.b = tp.b;
  out.sigma = sig;
  out.u.resize(N);
  if (anc == TransportAnchor::origin) {
    for (std::size_t i = 0; i < N; ++i) out.u[i] = g[i] * F[i];
  } else {
    // integrand decays like e^{-kw}; k from the last two decades' log slope
    cplx tail{};
    std::size_t m = N - 1, m2 = N - 1 - N / 12;
    double a1 = std::abs(integrand[m]), a2 = std::abs(integrand[m2]);
    if (a1 > 0.0 && a2 > 0.0) {
      double k = std::log(a2 / a1) / (std::log(sig[m] / sig[m2]));
      if (k > 0.05) tail = integrand[m] / k;
    }
    cplx total = F[N - 1] + tail;
    for (std::size_t i = 0; i < N; ++i) out.u[i] = -g[i] * (total - F[i]);
  }
  return out;
}

// Least-squares tail exponent of |u| on sigma in [lo, hi]; default is the last decade of the grid.
inline LineFit tail_exponent(const TransportTerm& t, double lo = 0.0, double hi = 0.0) {
  if (hi <= 0.0) hi = t.sigma.back();
  if (lo <= 0.0) lo = hi / 10.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.sigma.size(); ++i)
    if (t.sigma[i] >= lo * (1 - 1e-12) && t.sigma[i] <= hi * (1 + 1e-12) && std::abs(t.u[i]) > 0.0) {
      lx.push_back(std::log(t.sigma[i]));
      ly.push_back(std::log(std::abs(t.u[i])));
    }
  return fit_line(lx, ly);
}

// Homogeneous hierarchy: u_0 = g, u_j anchored at infinity.
inline std::vector<TransportTerm> wkb_hierarchy(int J, const TransportParams& tp) {
  std::vector<TransportTerm> terms;
  auto sig = transport_grid(tp);
  TransportTerm t0;
  t0.j = 0;
  t0.b = tp.b;
  t0.sigma = sig;
  for (double s : sig) t0.u.emplace_back(transport_homogeneous(s, tp.b), 0.0);
  terms.push_back(t0);
  for (int j = 1; j < J; ++j) terms.push_back(transport_solve(j, {}, &terms.back(), tp, TransportAnchor::infinity));
  return terms;
}

struct WkbOrderResult {
  double measured_order = 0.0;
  double r2 = 0.0;
  bool inconclusive = false;
  std::vector<double> h;
  std::vector<double> error;
};

// Compares the J-term sum exp(-i phi/h) sum_{j<J} h^j conj(u_j) with the conjugated spectral
// solution g = x^{-n/2} u along theta = (0, 1/h), where z = x; the hierarchy as written carries
// exp(+i phi/h), so the outgoing branch is its conjugate.
inline WkbOrderResult wkb_order_check(const ModelParams& params, int J, const std::vector<double>& h_list,
                                      double sigma_lo = 1.0, double sigma_hi = 2.8, double tol = 1e-12) {
  if (h_list.size() < 4) throw config_error("wkb_order_check: need at least 4 h values");
  for (std::size_t i = 0; i + 1 < h_list.size(); ++i)
    if (std::fabs(h_list[i] / h_list[i + 1] - 2.0) > 1e-9)
      throw config_error("wkb_order_check: h list must be geometric with ratio 2");
  if (J < 0) throw config_error("wkb_order_check: J must be >= 0");
  if (params.mode != Mode::ads) throw config_error("wkb_order_check: needs ads mode");
  auto tp = transport_params(params);
  auto terms = wkb_hierarchy(std::max(J, 1), tp);
  const auto& sig = terms[0].sigma;
  std::vector<std::size_t> win;
  for (std::size_t i = 0; i < sig.size(); ++i)
    if (sig[i] >= sigma_lo && sig[i] <= sigma_hi) win.push_back(i);
  if (win.size() < 8) throw config_error("wkb_order_check: sigma window too small");
  std::vector<double> xg;
  for (auto i : win) xg.push_back(std::cbrt(sig[i] * sig[i]));
  double xmax = std::max(2.0, xg.back());
  WkbOrderResult res;
  std::vector<double> lh, le;
  for (double h : h_list) {
    Covector th({0.0}, 1.0 / h);
    auto sol = solve_spectral(params, th, xmax, tol, xg);
    std::vector<cplx> g(win.size()), W(win.size());
    for (std::size_t k = 0; k < win.size(); ++k) {
      g[k] = sol.values[k] * std::pow(xg[k], -0.5 * params.n);
      double ph = phase_value(PhaseKind::limit, xg[k], 0.0, 1.0);
      cplx sum{};
      double hp = 1.0;
      for (int j = 0; j < J; ++j, hp *= h) sum += hp * std::conj(terms[j].u[win[k]]);
      W[k] = std::polar(1.0, -ph / h) * sum;
    }
    cplx num{};
    double den = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) num += std::conj(W[k]) * g[k], den += std::norm(W[k]);
    cplx C = den > 0.0 ? num / den : cplx{};
    double err = 0.0, gm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      err = std::max(err, std::abs(g[k] - C * W[k]));
      gm = std::max(gm, std::abs(g[k]));
    }
    res.h.push_back(h);
    res.error.push_back(err / gm);
    lh.push_back(std::log(h));
    le.push_back(std::log(err / gm));
  }
  auto fit = fit_line(lh, le);
  res.measured_order = fit.slope;
  res.r2 = fit.r2;
  res.inconclusive = fit.r2 < 0.9;
  return res;
}

}  // namespace glance
