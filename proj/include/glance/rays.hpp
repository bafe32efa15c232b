#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "ode.hpp"

namespace glance {

struct PhaseSpacePoint {
  double x = 0.0;
  std::vector<double> y;  // length n
  double xi = 0.0;
  Covector theta;

  bool on_characteristic() const;
};

// l = -xi^2 + (1+x) theta_n^2 - |theta'|^2
inline double symbol_l(const PhaseSpacePoint& p) {
  double tn = p.theta.theta_n;
  return -p.xi * p.xi + (1.0 + p.x) * tn * tn - p.theta.prime_norm2();
}

inline bool PhaseSpacePoint::on_characteristic() const { return std::fabs(symbol_l(*this)) <= 1e-10; }

struct DiffractiveValues {
  double Hx;
  double H2x;
};

inline DiffractiveValues diffractive_check(const PhaseSpacePoint& p) {
  return {-2.0 * p.xi, 2.0 * p.theta.theta_n * p.theta.theta_n};
}

struct Trajectory {
  std::vector<double> t;
  std::vector<PhaseSpacePoint> points;
  std::vector<double> symbol;
  double max_symbol_drift = 0.0;
  double richardson_error = 0.0;  // step-doubling estimate of the state error at the end
};

namespace detail {

// state = (x, y_1..y_n, xi); theta frozen
inline std::vector<double> hamilton_rhs(const std::vector<double>& s, const Covector& th) {
  std::size_t n = s.size() - 2;
  std::vector<double> d(s.size(), 0.0);
  double x = s[0], xi = s[n + 1], tn = th.theta_n;
  d[0] = -2.0 * xi;                              // dl/dxi
  for (std::size_t k = 0; k + 1 < n; ++k) d[1 + k] = -2.0 * th.theta_prime[k];  // dl/dtheta'
  d[n] = 2.0 * (1.0 + x) * tn;                   // dl/dtheta_n
  d[n + 1] = -tn * tn;                           // -dl/dx
  return d;
}

inline std::vector<double> rk4_vec(const std::vector<double>& y, double dt, const Covector& th) {
  auto k1 = hamilton_rhs(y, th);
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] + 0.5 * dt * k1[i];
  auto k2 = hamilton_rhs(t, th);
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] + 0.5 * dt * k2[i];
  auto k3 = hamilton_rhs(t, th);
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] + dt * k3[i];
  auto k4 = hamilton_rhs(t, th);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

inline std::vector<double> pack(const PhaseSpacePoint& p) {
  std::vector<double> s;
  s.push_back(p.x);
  s.insert(s.end(), p.y.begin(), p.y.end());
  s.push_back(p.xi);
  return s;
}

inline PhaseSpacePoint unpack(const std::vector<double>& s, const Covector& th) {
  PhaseSpacePoint p;
  p.x = s.front();
  p.y.assign(s.begin() + 1, s.end() - 1);
  p.xi = s.back();
  p.theta = th;
  return p;
}

}  // namespace detail

// Hamilton flow of l for time T (negative T flows backwards).
inline Trajectory flow(const PhaseSpacePoint& p0, double T, double dt) {
  if (p0.y.size() != p0.theta.theta_prime.size() + 1)
    throw config_error("flow: y must have one more component than theta'");
  if (!(dt > 0.0) || dt > std::fabs(T) / 100.0 * (1 + 1e-12)) throw config_error("flow: need 0 < dt <= |T|/100");
  long steps = long(std::ceil(std::fabs(T) / dt - 1e-9));
  double h = T / double(steps);
  Trajectory tr;
  auto s = detail::pack(p0), fine = s;
  double l0 = symbol_l(p0);
  tr.t.push_back(0.0);
  tr.points.push_back(p0);
  tr.symbol.push_back(l0);
  for (long k = 1; k <= steps; ++k) {
    s = detail::rk4_vec(s, h, p0.theta);
    fine = detail::rk4_vec(detail::rk4_vec(fine, 0.5 * h, p0.theta), 0.5 * h, p0.theta);
    for (double v : s)
      if (!std::isfinite(v)) throw integration_error("flow: non-finite state");
    auto p = detail::unpack(s, p0.theta);
    double l = symbol_l(p);
    tr.t.push_back(k * h);
    tr.points.push_back(p);
    tr.symbol.push_back(l);
    tr.max_symbol_drift = std::max(tr.max_symbol_drift, std::fabs(l - l0));
  }
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) e = std::max(e, std::fabs(s[i] - fine[i]));
  tr.richardson_error = e / 15.0;
  return tr;
}

// ---- extended one-dimensional profiles

enum class ProfileSign { plus, minus };

struct QuinticHermite {
  double a, b;
  std::array<double, 6> c;  // coefficients in u = (s - a)/(b - a)

  QuinticHermite(double a_, double b_, double f0, double d0, double s0, double f1, double d1, double s1)
      : a(a_), b(b_) {
    double L = b - a;
    double p0 = f0, p1 = d0 * L, p2 = s0 * L * L / 2.0;
    double r0 = f1 - p0 - p1 - p2;
    double r1 = d1 * L - p1 - 2 * p2;
    double r2 = s1 * L * L - 2 * p2;
    // c3 + c4 + c5 = r0, 3c3 + 4c4 + 5c5 = r1, 6c3 + 12c4 + 20c5 = r2
    double c3 = 10 * r0 - 4 * r1 + 0.5 * r2;
    double c4 = -15 * r0 + 7 * r1 - r2;
    double c5 = 6 * r0 - 3 * r1 + 0.5 * r2;
    c = {p0, p1, p2, c3, c4, c5};
  }
  double value(double s) const {
    double u = (s - a) / (b - a);
    return c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
  }
  double deriv(double s) const {
    double u = (s - a) / (b - a);
    return (c[1] + u * (2 * c[2] + u * (3 * c[3] + u * (4 * c[4] + u * 5 * c[5])))) / (b - a);
  }
  double deriv2(double s) const {
    double u = (s - a) / (b - a), L = b - a;
    return (2 * c[2] + u * (6 * c[3] + u * (12 * c[4] + u * 20 * c[5]))) / (L * L);
  }
};

// v+ = -(4/9) s^{-2/3}, v- = +(4/9) s^{-2/3}
inline double base_profile(ProfileSign sg, double s, int order = 0) {
  double c = (sg == ProfileSign::plus ? -4.0 : 4.0) / 9.0;
  if (order == 0) return c * std::pow(s, -2.0 / 3.0);
  if (order == 1) return c * (-2.0 / 3.0) * std::pow(s, -5.0 / 3.0);
  return c * (10.0 / 9.0) * std::pow(s, -8.0 / 3.0);
}

struct ExtendedProfile {
  ProfileSign sign;
  double plateau = 1.0;
  QuinticHermite first, second;
  double join;  // beyond this point the profile is the base power law

  explicit ExtendedProfile(ProfileSign sg, double plateau_value = 1.0, double knee_slope = -2.5)
      : sign(sg),
        plateau(plateau_value),
        first(make_first(sg, plateau_value, knee_slope)),
        second(make_second(sg, knee_slope)),
        join(sg == ProfileSign::plus ? 1.0 : 0.5) {
    if (!(plateau_value > 4.0 / 9.0)) throw domain_error("ExtendedProfile: plateau must exceed 4/9");
  }

  double value(double s) const {
    if (s <= 0.25) return plateau;
    if (s <= 0.5) return first.value(s);
    if (s < join) return second.value(s);
    return base_profile(sign, s);
  }
  double deriv(double s) const {
    if (s <= 0.25) return 0.0;
    if (s <= 0.5) return first.deriv(s);
    if (s < join) return second.deriv(s);
    return base_profile(sign, s, 1);
  }
  double deriv2(double s) const {
    if (s <= 0.25) return 0.0;
    if (s <= 0.5) return first.deriv2(s);
    if (s < join) return second.deriv2(s);
    return base_profile(sign, s, 2);
  }
  // xi^2 + v - 4/9
  double energy(double s, double xi) const { return xi * xi + value(s) - 4.0 / 9.0; }

 private:
  static QuinticHermite make_first(ProfileSign sg, double c, double d) {
    if (sg == ProfileSign::plus) return QuinticHermite(0.25, 0.5, c, 0, 0, 4.0 / 9.0, d, 0);
    return QuinticHermite(0.25, 0.5, c, 0, 0, base_profile(sg, 0.5), base_profile(sg, 0.5, 1),
                          base_profile(sg, 0.5, 2));
  }
  static QuinticHermite make_second(ProfileSign sg, double d) {
    if (sg == ProfileSign::plus)
      return QuinticHermite(0.5, 1.0, 4.0 / 9.0, d, 0, base_profile(sg, 1.0), base_profile(sg, 1.0, 1),
                            base_profile(sg, 1.0, 2));
    return QuinticHermite(0.5, 1.0, 0, 0, 0, 0, 0, 0);  // unused: join at 1/2
  }
};

struct EscapeStart {
  double sigma;
  double xi;
};

struct EscapeReport {
  std::vector<double> escape_times;  // negative: did not escape
  std::vector<double> energy_drift;
  double max_energy_drift = 0.0;
  std::size_t escaped = 0;
  bool all_escaped() const { return escaped == escape_times.size(); }
};

struct ProfileTrajectory {
  std::vector<double> t, sigma, xi, energy;
};

inline ProfileTrajectory profile_flow(const ExtendedProfile& v, EscapeStart s0, double R, double T_max, double dt) {
  auto rhs = [&](double, const std::array<double, 2>& y) -> std::array<double, 2> {
    return {2.0 * y[1], -v.deriv(y[0])};
  };
  ProfileTrajectory tr;
  std::array<double, 2> y{s0.sigma, s0.xi};
  double t = 0.0;
  tr.t.push_back(t);
  tr.sigma.push_back(y[0]);
  tr.xi.push_back(y[1]);
  tr.energy.push_back(v.energy(y[0], y[1]));
  while (t < T_max && std::fabs(y[0]) <= R) {
    y = rk4_step<2>(rhs, t, y, dt);
    t += dt;
    tr.t.push_back(t);
    tr.sigma.push_back(y[0]);
    tr.xi.push_back(y[1]);
    tr.energy.push_back(v.energy(y[0], y[1]));
  }
  return tr;
}

inline EscapeReport escape_times(const ExtendedProfile& v, const std::vector<EscapeStart>& starts, double R,
                                 double T_max, double dt = 5e-4) {
  EscapeReport rep;
  for (auto s : starts) {
    auto tr = profile_flow(v, s, R, T_max, dt);
    double e0 = tr.energy.front(), drift = 0.0;
    for (double e : tr.energy) drift = std::max(drift, std::fabs(e - e0));
    bool out = std::fabs(tr.sigma.back()) > R;
    rep.escape_times.push_back(out ? tr.t.back() : -1.0);
    rep.energy_drift.push_back(drift);
    rep.max_energy_drift = std::max(rep.max_energy_drift, drift);
    if (out) ++rep.escaped;
  }
  return rep;
}

inline EscapeReport nontrapping_escape(const ExtendedProfile& v, const std::vector<EscapeStart>& starts, double R,
                                       double T_max, double dt = 5e-4) {
  auto rep = escape_times(v, starts, R, T_max, dt);
  if (!rep.all_escaped())
    throw property_violation("nontrapping_escape: " + std::to_string(starts.size() - rep.escaped) +
                             " trajectories stayed in the compact set");
  return rep;
}

// Starts on the zero-energy set, spread over the allowed part of [lo, hi], both directions.
inline std::vector<EscapeStart> characteristic_starts(const ExtendedProfile& v, std::size_t count, double lo = 0.0,
                                                      double hi = 10.0) {
  std::vector<double> allowed;
  const int M = 4000;
  for (int i = 0; i <= M; ++i) {
    double s = lo + (hi - lo) * i / M;
    if (v.value(s) <= 4.0 / 9.0) allowed.push_back(s);
  }
  if (allowed.empty()) throw domain_error("characteristic_starts: no allowed region");
  std::vector<EscapeStart> out;
  std::size_t half = (count + 1) / 2;
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t j = k % half;
    double s = allowed[(allowed.size() - 1) * j / std::max<std::size_t>(1, half - 1)];
    double xi = std::sqrt(std::max(0.0, 4.0 / 9.0 - v.value(s)));
    out.push_back({s, k < half ? xi : -xi});
  }
  return out;
}

}  // namespace glance
