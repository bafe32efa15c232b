#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace glance {

enum class Mode { friedlander, ads };

struct ModelParams {
  int n = 2;
  double lambda = 0.84;
  double s_minus = 0.6;
  double s_plus = 1.4;
  Mode mode = Mode::ads;
  double delta2_tilde = 0.25;

  // sqrt(n^2/4 - lambda)
  double alpha() const { return 0.5 * (s_plus - s_minus); }
  // lambda - n^2/4
  double nu() const { return lambda - 0.25 * n * n; }
};

struct IndicialRoots {
  double s_minus;
  double s_plus;
  bool degenerate;  // 2*sqrt(n^2/4 - lambda) is an integer
};

inline IndicialRoots indicial_roots(int n, double lambda) {
  double disc = 0.25 * double(n) * double(n) - lambda;
  if (!(disc > 0.0)) throw domain_error("indicial_roots: lambda must be < n^2/4");
  double r = std::sqrt(disc);
  double two_r = 2.0 * r;
  bool deg = std::fabs(two_r - std::round(two_r)) < 1e-9;
  return {0.5 * n - r, 0.5 * n + r, deg};
}

inline ModelParams make_params(int n = 2, double lambda = 0.84, Mode mode = Mode::ads,
                               double delta2_tilde = 0.25) {
  if (n < 2) throw domain_error("make_params: n must be >= 2");
  if (!(delta2_tilde > 0.0)) throw domain_error("make_params: delta2_tilde must be positive");
  auto r = indicial_roots(n, lambda);
  if (r.degenerate)
    throw domain_error("make_params: 2*sqrt(n^2/4 - lambda) is an integer (degenerate Frobenius case)");
  ModelParams p;
  p.n = n;
  p.lambda = lambda;
  p.s_minus = r.s_minus;
  p.s_plus = r.s_plus;
  p.mode = mode;
  p.delta2_tilde = delta2_tilde;
  return p;
}

struct Covector {
  std::vector<double> theta_prime;
  double theta_n = 1.0;

  Covector() = default;
  Covector(std::vector<double> tp, double tn) : theta_prime(std::move(tp)), theta_n(tn) {
    if (theta_n == 0.0) throw domain_error("Covector: theta_n must be nonzero");
  }

  double prime_norm2() const {
    return std::inner_product(theta_prime.begin(), theta_prime.end(), theta_prime.begin(), 0.0);
  }
  double prime_norm() const { return std::sqrt(prime_norm2()); }
  std::vector<double> theta_hat_prime() const {
    std::vector<double> r(theta_prime);
    for (auto& v : r) v /= theta_n;
    return r;
  }
  double hat_norm2() const { return prime_norm2() / (theta_n * theta_n); }
};

struct GlancingFrame {
  double Z0, Z, z, h, sigma, t;
};

namespace detail {

inline double bump_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// 0 for u <= 0, 1 for u >= 1, smooth in between
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double a = bump_tail(u), b = bump_tail(1.0 - u);
  return a / (a + b);
}

}  // namespace detail

struct Cutoffs {
  double chi0, chi_plus, chi_minus;
};

inline Cutoffs region_cutoffs(double Z0, double delta) {
  double cp = detail::smooth_step((Z0 - delta) / delta);
  double cm = detail::smooth_step((-Z0 - delta) / delta);
  return {1.0 - cp - cm, cp, cm};
}

inline GlancingFrame glancing_coordinates(double x, const Covector& theta, const ModelParams& params) {
  if (theta.theta_n == 0.0) throw domain_error("glancing_coordinates: theta_n must be nonzero");
  if (x < 0.0) throw domain_error("glancing_coordinates: x must be >= 0");
  double tn23 = std::cbrt(theta.theta_n * theta.theta_n);
  double Z0 = tn23 * (1.0 - theta.hat_norm2());
  double S = x * tn23;
  GlancingFrame f;
  f.Z0 = Z0;
  f.Z = Z0 + S;
  auto c = region_cutoffs(Z0, params.delta2_tilde);
  f.z = c.chi0 * S;
  f.h = c.chi0;
  f.sigma = c.chi0 * std::pow(S, 1.5);
  f.t = c.chi0 * S;
  if (c.chi_plus > 0.0) {
    double zp = S / Z0, hp = std::pow(Z0, -1.5);
    f.z += c.chi_plus * zp;
    f.h += c.chi_plus * hp;
    f.sigma += c.chi_plus * std::pow(zp, 1.5);
    f.t += c.chi_plus * zp / hp;
  }
  if (c.chi_minus > 0.0) {
    double zm = S / (-Z0), hm = std::pow(-Z0, -1.5);
    f.z += c.chi_minus * zm;
    f.h += c.chi_minus * hm;
    f.sigma += c.chi_minus * std::pow(zm, 1.5);
    f.t += c.chi_minus * zm / hm;
  }
  return f;
}

// q = (1+x) theta_n^2 - |theta'|^2
inline double potential_q(double x, const Covector& th) {
  return (1.0 + x) * th.theta_n * th.theta_n - th.prime_norm2();
}

// max |x^{-n/2} L (x^{n/2} g) - Q g| on the interior of a uniform grid, five-point centered differences.
inline double conjugation_residual(const std::function<double(double)>& g, double a, double b, int npts,
                                   const Covector& theta, const ModelParams& params) {
  if (npts < 16) throw config_error("conjugation_residual: grid needs at least 16 points");
  if (!(a > 0.0) || !(b > a)) throw config_error("conjugation_residual: need 0 < a < b");
  const int margin = 6;
  double dx = (b - a) / (npts - 1);
  double n = params.n, lam = params.lambda, nu = params.nu();
  auto u = [&](double x) { return std::pow(x, 0.5 * n) * g(x); };
  double worst = 0.0;
  for (int i = margin; i < npts - margin; ++i) {
    double x = a + i * dx;
    double q = potential_q(x, theta);
    auto d1 = [&](auto&& f) { return (-f(x + 2 * dx) + 8 * f(x + dx) - 8 * f(x - dx) + f(x - 2 * dx)) / (12 * dx); };
    auto d2 = [&](auto&& f) {
      return (-f(x + 2 * dx) + 16 * f(x + dx) - 30 * f(x) + 16 * f(x - dx) - f(x - 2 * dx)) / (12 * dx * dx);
    };
    double g0 = g(x), u0 = u(x);
    double u1 = d1(u), u2 = d2(u), g1 = d1(g), g2 = d2(g);
    double Lu = x * x * u2 - (n - 1) * x * u1 + x * x * q * u0 + lam * u0;
    double lhs = std::pow(x, -0.5 * n) * Lu;
    double rhs = x * x * g2 + x * g1 + nu * g0 + x * x * q * g0;
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

}  // namespace glance
