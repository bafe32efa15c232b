#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <glance/glance.hpp>

namespace glance::cli {

struct SelfCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

inline std::vector<SelfCheck> run_selftest() {
  using detail::near;
  std::vector<SelfCheck> out;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    SelfCheck c{name, false, ""};
    try {
      auto r = f();
      c.pass = r.first;
      c.detail = r.second;
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(c);
  };
  const double pi = std::numbers::pi;

  // model
  check("indicial_roots(2, 0.84)", [] {
    auto r = indicial_roots(2, 0.84);
    return std::pair{near(r.s_minus, 0.6, 1e-12) && near(r.s_plus, 1.4, 1e-12), io::fmt(r.s_minus)};
  });
  check("indicial_roots(2, 0)", [] {
    auto r = indicial_roots(2, 0.0);
    return std::pair{near(r.s_minus, 0.0, 1e-12) && near(r.s_plus, 2.0, 1e-12), io::fmt(r.s_plus)};
  });
  check("indicial_roots(4, 3)", [] {
    auto r = indicial_roots(4, 3.0);
    return std::pair{near(r.s_minus, 1.0, 1e-12) && near(r.s_plus, 3.0, 1e-12), io::fmt(r.s_minus)};
  });
  auto P = make_params();
  check("glancing_coordinates theta=(0,8)", [&] {
    auto f = glancing_coordinates(0.0, Covector({0.0}, 8.0), P);
    return std::pair{near(f.Z0, 4.0, 1e-12) && near(f.Z, 4.0, 1e-12), io::fmt(f.Z0)};
  });
  check("glancing Z0 = 0", [&] {
    bool ok = true;
    for (double tn : {0.3, 1.0, 7.0, -12.0}) ok &= near(glancing_coordinates(0.5, Covector({tn}, tn), P).Z0, 0.0, 1e-12);
    return std::pair{ok, std::string()};
  });
  check("glancing h at |theta_hat'|^2 = 0.5", [&] {
    auto f = glancing_coordinates(0.0, Covector({8.0 * std::sqrt(0.5)}, 8.0), P);
    return std::pair{near(f.Z0, 2.0, 1e-12) && near(f.h, std::pow(2.0, -1.5), 1e-12), io::fmt(f.h)};
  });
  check("conjugation: indicial part annihilates x^{s-}", [&] {
    auto Pl = make_params(2, 0.84);
    Covector th({0.0}, 1e-8);
    double r = conjugation_residual([&](double x) { return std::pow(x, Pl.s_minus - 1.0); }, 0.5, 1.0, 2001, th, Pl);
    return std::pair{r < 1e-5, io::fmt(r)};
  });

  // specfun
  check("hankel h2 = conj(h1)", [] {
    bool ok = true;
    for (double a : {0.3, 1.0, 2.5})
      for (double t : {0.1, 3.0, 40.0}) {
        auto h = hankel_pair(a, t);
        ok &= std::abs(h.h2 - std::conj(h.h1)) <= 1e-14 * std::abs(h.h1);
      }
    return std::pair{ok, std::string()};
  });
  check("K_{1/2} closed form", [&] {
    double worst = 0;
    for (double t : {0.01, 0.5, 2.0, 20.0}) {
      double e = std::sqrt(pi / (2 * t)) * std::exp(-t);
      worst = std::max(worst, std::fabs(macdonald(0.5, t) - e) / e);
    }
    return std::pair{worst < 1e-12, io::fmt(worst)};
  });

  // frobenius
  check("frobenius c1 = 0", [&] {
    bool ok = true;
    for (double tp : {0.0, 0.7, 3.0})
      for (int sg : {1, -1}) ok &= frobenius_coeffs(P, Covector({tp}, 2.0), sg, 6).coeffs[1] == 0.0;
    return std::pair{ok, std::string()};
  });
  check("friedlander x = 0 gives 1", [] {
    bool ok = true;
    for (double tn : {0.5, 3.0, -8.0}) ok &= near(friedlander_closed_form(0.0, Covector({0.2}, tn)).real(), 1.0, 1e-15);
    return std::pair{ok, std::string()};
  });
  check("friedlander Airy ODE residual O(step^2)", [] {
    Covector th({1.0}, 2.0);
    auto K = [&](double x) { return friedlander_closed_form(x, th).real(); };
    auto res = [&](double d) {
      double x = 0.7;
      double k2 = (K(x + d) - 2 * K(x) + K(x - d)) / (d * d);
      return std::fabs(k2 + potential_q(x, th) * K(x));
    };
    double r1 = res(1e-2), r2 = res(5e-3);
    return std::pair{r1 / r2 > 3.5 && r1 < 1e-3, io::fmt(r1 / r2)};
  });
  check("x^{-s-} u - 1 = O(x^{2 alpha}) near 0", [&] {
    auto sol = solve_spectral(P, Covector({0.5}, 2.0), 2.0, 1e-10);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < sol.x_grid.size(); ++i) {
      double x = sol.x_grid[i];
      if (x > 0.05) break;
      lx.push_back(std::log(x));
      ly.push_back(std::log(std::abs(std::pow(x, -P.s_minus) * sol.values[i] - 1.0)));
    }
    double s = fit_line(lx, ly).slope;
    return std::pair{s >= 2 * P.alpha() - 0.1, io::fmt(s)};
  });

  // eikonal
  check("phi_in(z, z) = 0", [] {
    return std::pair{phase_value(PhaseKind::in, 2.3, 2.3, 0.1) == 0.0, std::string()};
  });
  check("phi_out(0, 0) = 0", [] { return std::pair{phase_value(PhaseKind::out, 0, 0, 0.1) == 0.0, std::string()}; });
  check("phi_in(3, 0, 1) = 14/3", [] {
    double v = phase_value(PhaseKind::in, 3, 0, 1);
    return std::pair{near(v, 14.0 / 3.0, 1e-14), io::fmt(v)};
  });
  check("eikonal residual of +-phi vanishes", [] {
    double w = 0;
    for (double z : {0.0, 0.4, 3.0, 9.5}) w = std::max({w, std::fabs(eikonal_residual_limit(z, 1)), std::fabs(eikonal_residual_limit(z, -1))});
    return std::pair{w <= 1e-12, io::fmt(w)};
  });
  check("transport: e0 = 0 gives u0 = 0", [&] {
    auto tp = transport_params(P);
    tp.points = 512;
    auto t = transport_solve(0, std::vector<cplx>(tp.points, cplx{}), nullptr, tp);
    return std::pair{detail::max_abs(t.u) == 0.0, std::string()};
  });

  // normal_ops
  check("mellin: f = ((x d)^2 - a) g recovers g", [] {
    double a = 1.0;
    auto g = [](double x) { double l = std::log(x); return cplx(std::exp(-l * l), 0.0); };
    auto f = [&](double x) {
      double l = std::log(x), e = std::exp(-l * l);
      return cplx((4 * l * l - 2) * e - a * e, 0.0);
    };
    auto F = sample_half_line(f, 1e-4, 1e4, 2001);
    auto u = mellin_solve(F, a);
    double w = 0;
    for (std::size_t i = 0; i < F.t.size(); ++i) w = std::max(w, std::abs(u.values[i] - g(F.t[i])));
    return std::pair{w < 1e-6, io::fmt(w)};
  });
  check("bessel layer: f = 0 gives u = 0", [] {
    auto F = sample_half_line([](double) { return cplx{}; }, 1e-3, 50, 512);
    return std::pair{detail::max_abs(bessel_layer_solve(F, 0.4).u.values) == 0.0, std::string()};
  });
  check("elliptic layer: f = 0 gives u = 0", [] {
    auto F = sample_half_line([](double) { return cplx{}; }, 1e-3, 50, 512);
    return std::pair{detail::max_abs(elliptic_layer_solve(F, 0.4).u.values) == 0.0, std::string()};
  });
  check("outgoing resolvent preserves evenness", [] {
    auto F = sample_line([](double z) { return cplx(std::exp(-4 * z * z), 0.0); }, -10, 10, 2001);
    auto u = free_outgoing_resolvent(F, 1.0);
    double w = 0;
    std::size_t n = u.u.values.size();
    for (std::size_t i = 0; i < n; ++i) w = std::max(w, std::abs(u.u.values[i] - u.u.values[n - 1 - i]));
    return std::pair{w < 1e-12, io::fmt(w)};
  });
  check("decaying resolvent preserves evenness", [] {
    auto F = sample_line([](double z) { return cplx(std::exp(-4 * z * z), 0.0); }, -10, 10, 2001);
    auto u = free_decaying_resolvent(F, 2.0);
    double w = 0;
    std::size_t n = u.u.values.size();
    for (std::size_t i = 0; i < n; ++i) w = std::max(w, std::abs(u.u.values[i] - u.u.values[n - 1 - i]));
    return std::pair{w < 1e-12, io::fmt(w)};
  });
  check("decaying resolvent point-mass limit", [&] {
    double s = 0.02, k2 = 1.0;
    auto F = sample_line([&](double z) { return cplx(std::exp(-z * z / (2 * s * s)) / (s * std::sqrt(2 * pi)), 0.0); },
                         -10, 10, 4001);
    auto u = free_decaying_resolvent(F, k2);
    double w = 0;
    for (std::size_t i = 0; i < F.values.size(); ++i) {
      double z = F.at(i);
      if (std::fabs(z) < 0.5) continue;
      w = std::max(w, std::abs(u.u.values[i] + std::exp(-std::fabs(z)) / 2.0));
    }
    return std::pair{w < 1e-3, io::fmt(w)};
  });

  // rays
  auto pt = [](double x, double xi, double tp, double tn) {
    PhaseSpacePoint p;
    p.x = x;
    p.xi = xi;
    p.y = {0.0, 0.0};
    p.theta.theta_prime = {tp};
    p.theta.theta_n = tn;
    return p;
  };
  check("symbol_l examples", [&] {
    bool ok = symbol_l(pt(0, 0, 1.3, 1.3)) == 0.0 && symbol_l(pt(0, 1, 0, 1)) == 0.0 && symbol_l(pt(1, 0, 0, 1)) == 2.0;
    return std::pair{ok, std::string()};
  });
  check("diffractive_check examples", [&] {
    auto a = diffractive_check(pt(0, 1, 0, 1));
    auto b = diffractive_check(pt(0, 0, 0, 0));
    return std::pair{a.Hx == -2.0 && b.H2x == 0.0, std::string()};
  });
  check("glancing ray departs quadratically", [&] {
    auto tr = flow(pt(0, 0, 1, 1), 2.0, 1e-3);
    double w = 0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      double s = tr.t[k];
      w = std::max({w, std::fabs(tr.points[k].x - s * s), std::fabs(tr.points[k].xi + s)});
    }
    return std::pair{w < 1e-10, io::fmt(w)};
  });
  check("profile: rightward escape from (2, 0.5)", [] {
    ExtendedProfile v(ProfileSign::plus);
    auto tr = profile_flow(v, {2.0, 0.5}, 10.0, 100.0, 1e-3);
    bool mono = true;
    for (double xi : tr.xi) mono &= xi > 0.0;
    return std::pair{mono && tr.sigma.back() > 10.0, io::fmt(tr.t.back())};
  });
  check("profile energy conserved", [] {
    ExtendedProfile v(ProfileSign::plus);
    auto tr = profile_flow(v, {0.7, 0.1}, 10.0, 100.0, 5e-4);
    double w = 0;
    for (double e : tr.energy) w = std::max(w, std::fabs(e - tr.energy.front()));
    return std::pair{w <= 1e-8, io::fmt(w)};
  });

  // resolvent_probe
  check("operator without absorption is symmetric", [] {
    OperatorGrid g;
    g.absorbing = false;
    g.points = 800;
    g.auto_resolve = false;
    auto op = build_global_operator(ProfileSign::plus, 0.25, g);
    std::vector<cplx> u(op.size()), v(op.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(0.37 * i), v[i] = std::cos(0.11 * i * i);
    auto Au = op.apply(u), Av = op.apply(v);
    cplx a{}, b{};
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) a += Au[i] * v[i], b += u[i] * Av[i], s += std::abs(Au[i] * v[i]);
    return std::pair{std::abs(a - b) <= 1e-12 * s, io::fmt(std::abs(a - b) / s)};
  });
  check("resolvent identity on interior data", [] {
    auto op = build_global_operator(ProfileSign::plus, 0.125, {});
    std::vector<cplx> f(op.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-8.0 * (op.sigma[i] - 3) * (op.sigma[i] - 3));
    auto u = op.solve(f);
    auto r = op.apply(u);
    double e = 0, m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) e = std::max(e, std::abs(r[i] - f[i])), m = std::max(m, std::abs(f[i]));
    return std::pair{e <= 1e-6 * m, io::fmt(e / m)};
  });

  // synthesis
  YGrid yg{64, 16.0};
  check("uhat = 1 synthesizes unit mass", [&] {
    auto F = synthesize_function([](double, double, double) { return cplx(1.0, 0.0); }, {0.1}, yg, 0.3);
    cplx s{};
    for (auto& v : F.data) s += v;
    s *= yg.dy() * yg.dy();
    return std::pair{std::abs(s - 1.0) < 1e-10, io::fmt(s.real())};
  });
  check("friedlander x = 0 row equals the mollified delta", [&] {
    SynthesisSpec sp;
    sp.grid = yg;
    sp.x_rows = {0.0};
    sp.epsilon = 0.3;
    auto F = synthesize_field(make_params(2, 0.84, Mode::friedlander), sp);
    auto D = synthesize_function([](double, double, double) { return cplx(1.0, 0.0); }, {0.0}, yg, 0.3);
    double w = 0;
    for (std::size_t k = 0; k < F.data.size(); ++k) w = std::max(w, std::abs(F.data[k] - D.data[k]));
    return std::pair{w < 1e-12, io::fmt(w)};
  });
  check("uhat even in theta' gives U even in y'", [&] {
    auto F = synthesize_function([](double, double a, double b) { return cplx(std::cos(a) + b * b, std::sin(b)); }, {0.1},
                                 yg, 0.3);
    double w = 0;
    std::size_t N = yg.points;
    for (std::size_t i = 1; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) w = std::max(w, std::abs(F.at(0, i, j) - F.at(0, N - i, j)));
    return std::pair{w < 1e-12, io::fmt(w)};
  });
  check("singular support starts at the origin", [] {
    auto p = singular_point(0.0, 0.0);
    return std::pair{p[0] == 0.0 && p[1] == 0.0, std::string()};
  });
  check("pure Gaussian has no singular cells", [] {
    YGrid g{256, 16.0};
    auto F = sample_field([](double, double a, double b) { return cplx(std::exp(-(a * a + b * b)), 0.0); }, {0.5}, g);
    F.epsilon = 3.0 / g.theta_max();
    auto rep = wavefront_scan(F, 0);
    return std::pair{rep.singular_cells == 0, std::to_string(rep.singular_cells)};
  });
  check("synthetic x^1.4 field fits 1.4", [&] {
    auto rows = log_grid(0.003, 0.09, 6);
    auto F = sample_field([](double x, double a, double b) { return cplx(std::pow(x, 1.4) * std::exp(-0.1 * (a * a + b * b)), 0.0); },
                          rows, yg);
    auto fit = shadow_exponent_fit(F, 1.0);
    return std::pair{near(fit.exponent, 1.4, 0.02), io::fmt(fit.exponent)};
  });
  return out;
}

}  // namespace glance::cli
