#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "frobenius.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace glance {

// Periodic square y-grid y_i = (i - N/2) dy and its dual theta_k = (k - N/2) dtheta.
struct YGrid {
  std::size_t points = 512;
  double extent = 16.0;

  double dy() const { return extent / double(points); }
  double y(std::size_t i) const { return (double(i) - 0.5 * double(points)) * dy(); }
  double dtheta() const { return 2.0 * std::numbers::pi / extent; }
  double theta(std::size_t k) const { return (double(k) - 0.5 * double(points)) * dtheta(); }
  double theta_max() const { return 0.5 * double(points) * dtheta(); }
  void validate() const {
    if (points < 16 || points % 4 != 0) throw config_error("YGrid: points must be a multiple of 4 and >= 16");
    if (!(extent > 0.0)) throw config_error("YGrid: extent must be positive");
  }
};

struct SynthesisSpec {
  YGrid grid;
  std::vector<double> x_rows;
  double epsilon = 0.0;  // 0 selects 3 / theta_max
  double tol = 1e-8;
  double x_max = 2.0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// U(x_r, y'_i, y_n_j) stored row-major [r][i][j]
struct Field2D {
  std::vector<double> x;
  YGrid grid;
  double epsilon = 0.0;
  std::vector<cplx> data;
  std::vector<std::array<double, 2>> pole_columns;  // (theta', theta_n) infilled
  std::size_t skipped_columns = 0;

  std::size_t plane_size() const { return grid.points * grid.points; }
  cplx& at(std::size_t r, std::size_t i, std::size_t j) { return data[r * plane_size() + i * grid.points + j]; }
  const cplx& at(std::size_t r, std::size_t i, std::size_t j) const {
    return data[r * plane_size() + i * grid.points + j];
  }
  std::size_t row_index(double xv) const {
    for (std::size_t r = 0; r < x.size(); ++r)
      if (std::fabs(x[r] - xv) <= 1e-12 * std::max(1.0, std::fabs(xv))) return r;
    throw config_error("Field2D: no such x row");
  }
};

inline double taper(double s2) { return std::exp(-s2); }

inline double default_epsilon(const YGrid& g) { return 3.0 / g.theta_max(); }

namespace detail {

inline unsigned thread_count(unsigned requested) {
  if (requested) return requested;
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

// spectrum[r][k1][k2] (already tapered) -> field rows
inline void inverse_synthesis(Field2D& f, std::vector<cplx>& spectrum) {
  const std::size_t N = f.grid.points, P = N * N;
  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * P));
  if (!buf) throw std::bad_alloc();
  fftw_plan plan = fftw_plan_dft_2d(int(N), int(N), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  double scale = std::pow(f.grid.dtheta() / (2.0 * std::numbers::pi), 2);
  f.data.assign(f.x.size() * P, cplx{});
  for (std::size_t r = 0; r < f.x.size(); ++r) {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        cplx v = spectrum[r * P + i * N + j];
        if ((i + j) & 1) v = -v;
        buf[i * N + j][0] = v.real();
        buf[i * N + j][1] = v.imag();
      }
    fftw_execute(plan);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        cplx v(buf[i * N + j][0], buf[i * N + j][1]);
        if ((i + j) & 1) v = -v;
        f.data[r * P + i * N + j] = scale * v;
      }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
}

}  // namespace detail

// Generic synthesis from a spectral function uhat(x, theta', theta_n).
inline Field2D synthesize_function(const std::function<cplx(double, double, double)>& uhat,
                                   const std::vector<double>& x_rows, const YGrid& grid, double epsilon) {
  grid.validate();
  if (!(epsilon >= 0.0)) throw config_error("synthesize_function: epsilon must be >= 0");
  Field2D f;
  f.x = x_rows;
  f.grid = grid;
  f.epsilon = epsilon;
  const std::size_t N = grid.points, P = N * N;
  std::vector<cplx> spec(x_rows.size() * P);
  for (std::size_t r = 0; r < x_rows.size(); ++r)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double a = grid.theta(i), b = grid.theta(j);
        spec[r * P + i * N + j] = uhat(x_rows[r], a, b) * taper(epsilon * epsilon * (a * a + b * b));
      }
  detail::inverse_synthesis(f, spec);
  return f;
}

// Field sampled directly in y (used for calibration).
inline Field2D sample_field(const std::function<cplx(double, double, double)>& u, const std::vector<double>& x_rows,
                            const YGrid& grid) {
  grid.validate();
  Field2D f;
  f.x = x_rows;
  f.grid = grid;
  const std::size_t N = grid.points;
  f.data.resize(x_rows.size() * N * N);
  for (std::size_t r = 0; r < x_rows.size(); ++r)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) f.at(r, i, j) = u(x_rows[r], grid.y(i), grid.y(j));
  return f;
}

inline Field2D synthesize_field(const ModelParams& params, SynthesisSpec spec) {
  const YGrid& g = spec.grid;
  g.validate();
  if (params.n != 2) throw config_error("synthesize_field: only n = 2 is supported");
  if (spec.x_rows.empty()) throw config_error("synthesize_field: no x rows");
  if (spec.epsilon == 0.0) spec.epsilon = default_epsilon(g);
  if (!(spec.epsilon > 0.0)) throw config_error("synthesize_field: epsilon must be positive");
  if (!(spec.tol > 0.0)) throw config_error("synthesize_field: tol must be positive");
  std::vector<double> rows = spec.x_rows;
  for (double x : rows) {
    if (x < 0.0 || (x == 0.0 && params.mode == Mode::ads)) throw domain_error("synthesize_field: x rows must be > 0");
    if (x > spec.x_max) throw config_error("synthesize_field: x row beyond x_max");
  }
  std::vector<std::size_t> order(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) order[r] = r;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a] < rows[b]; });
  std::vector<double> solve_grid;
  for (auto r : order)
    if (rows[r] > 0.0 && (solve_grid.empty() || rows[r] > solve_grid.back())) solve_grid.push_back(rows[r]);

  const std::size_t N = g.points, H = N / 2, P = N * N, R = rows.size();
  const double dth = g.dtheta(), eps = spec.epsilon, cut = 6.0 / eps;
  // quarter table over |theta'| = a dth (a = 0..H), theta_n = b dth (b = 0..H)
  std::vector<cplx> quarter((H + 1) * (H + 1) * R);
  std::vector<char> state((H + 1) * (H + 1), 0);  // 0 ok, 1 pole, 2 skipped
  auto qidx = [&](std::size_t a, std::size_t b) { return a * (H + 1) + b; };

  auto solve_column = [&](std::size_t a, std::size_t b) {
    double tp = double(a) * dth, tn = double(b) * dth;
    std::size_t q = qidx(a, b);
    if (tp * tp + tn * tn > cut * cut) {
      state[q] = 2;
      return;
    }
    if (a == 0 && b == 0) {
      for (std::size_t r = 0; r < R; ++r) {
        double x = rows[r];
        quarter[q * R + r] = params.mode == Mode::friedlander ? cplx(1.0) : cplx(std::pow(x, params.s_minus));
      }
      return;
    }
    Covector th({tp}, b == 0 ? 1e-6 * dth : tn);
    try {
      auto sol = solve_spectral(params, th, spec.x_max, spec.tol, solve_grid);
      for (std::size_t r = 0; r < R; ++r) {
        if (rows[r] == 0.0) {
          quarter[q * R + r] = 1.0;
          continue;
        }
        auto it = std::lower_bound(solve_grid.begin(), solve_grid.end(), rows[r]);
        quarter[q * R + r] = sol.values[std::size_t(it - solve_grid.begin())];
      }
    } catch (const pole_error&) {
      state[q] = 1;
    }
  };

  unsigned nt = detail::thread_count(spec.threads);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(nt);
  auto worker = [&](unsigned id) {
    try {
      for (std::size_t b; (b = next.fetch_add(1)) <= H;)
        for (std::size_t a = 0; a <= H; ++a) solve_column(a, b);
    } catch (...) {
      errs[id] = std::current_exception();
      next = H + 1;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  Field2D f;
  f.x = rows;
  f.grid = g;
  f.epsilon = eps;
  // pole infill from valid neighbours
  for (std::size_t a = 0; a <= H; ++a)
    for (std::size_t b = 0; b <= H; ++b) {
      if (state[qidx(a, b)] != 1) continue;
      f.pole_columns.push_back({double(a) * dth, double(b) * dth});
      int cnt = 0;
      std::vector<cplx> acc(R);
      const int da[] = {-1, 1, 0, 0}, db[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        long aa = long(a) + da[k], bb = long(b) + db[k];
        if (aa < 0 || bb < 0 || aa > long(H) || bb > long(H) || state[qidx(aa, bb)] != 0) continue;
        for (std::size_t r = 0; r < R; ++r) acc[r] += quarter[qidx(aa, bb) * R + r];
        ++cnt;
      }
      for (std::size_t r = 0; r < R; ++r) quarter[qidx(a, b) * R + r] = cnt ? acc[r] / double(cnt) : cplx{};
    }
  for (char s : state) f.skipped_columns += s == 2;

  std::vector<cplx> full(R * P);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      long ki = long(i) - long(H), kj = long(j) - long(H);
      std::size_t a = std::size_t(std::labs(ki)), b = std::size_t(std::labs(kj));
      std::size_t q = qidx(a, b);
      if (state[q] == 2) continue;
      double tp = g.theta(i), tn = g.theta(j);
      double w = taper(eps * eps * (tp * tp + tn * tn));
      for (std::size_t r = 0; r < R; ++r) {
        cplx v = quarter[q * R + r];
        full[r * P + i * N + j] = w * (kj < 0 ? std::conj(v) : v);
      }
    }
  detail::inverse_synthesis(f, full);
  return f;
}

// Singular support at height x: points (y', y_n) for a = |theta'|/|theta_n| in [0, 1], both signs of theta'.
struct PredictedCurve {
  double x = 0.0;
  std::vector<std::array<double, 2>> points;
};

inline std::array<double, 2> singular_point(double a, double x) {
  double p = std::sqrt(std::max(1.0 + x - a * a, 0.0)), p0 = std::sqrt(std::max(1.0 - a * a, 0.0));
  double yn = (2.0 / 3.0) * (p * p * p - p0 * p0 * p0) + 2.0 * a * a * (p - p0);
  double yp = -2.0 * a * (p - p0);
  return {yp, yn};
}

inline PredictedCurve predict_singular_support(const ModelParams& params, double x, std::size_t samples = 401) {
  (void)params;
  if (!(x > 0.0)) throw domain_error("predict_singular_support: x must be positive");
  if (samples < 2) throw config_error("predict_singular_support: need at least 2 samples");
  PredictedCurve c;
  c.x = x;
  for (std::size_t k = 0; k < samples; ++k) {
    double a = double(k) / double(samples - 1);
    auto pt = singular_point(a, x);
    c.points.push_back(pt);
    if (k > 0) c.points.push_back({-pt[0], pt[1]});
  }
  return c;
}

enum class DecayClass { smooth, singular, inconclusive };

struct WindowSpec {
  std::size_t cell = 32;
  std::size_t window = 64;
  int power = 2;  // window = hann^power
};

struct BandSpec {
  double k_lo = 2.0;           // lowest band edge, in window frequency index
  double max_detaper = 2.4;    // bands kept while epsilon * kappa <= max_detaper
  double threshold = -1.0;     // slope above threshold => singular
  double energy_floor = 1e-20; // cells below this fraction of the peak cell energy are smooth
  double noise_margin = 100.0; // bands must exceed the per-band floor (minimum over cells) by this factor
  std::size_t min_bands = 3;
  std::size_t fit_bands = 0;   // slope from the highest usable bands only (0 = all)
};

struct WavefrontReport {
  double x = 0.0;
  std::size_t cells_p = 0, cells_n = 0;
  double cell_length = 0.0;
  std::vector<DecayClass> cls;  // [ci][cj], ci along y', cj along y_n
  std::vector<double> slope;
  std::vector<char> shadow;
  std::vector<std::array<double, 2>> predicted;
  std::vector<double> match_distance;  // per singular cell, in cells
  double match_max = 0.0, match_mean = 0.0;
  std::size_t singular_cells = 0, shadow_singular = 0, shadow_cells = 0, inconclusive_cells = 0;

  std::array<double, 2> center(std::size_t ci, std::size_t cj, const YGrid& g, std::size_t cell) const {
    return {g.y(0) + (double(ci) + 0.5) * double(cell) * g.dy(), g.y(0) + (double(cj) + 0.5) * double(cell) * g.dy()};
  }
};

inline double curve_distance_cells(const std::array<double, 2>& c, const std::vector<std::array<double, 2>>& pts,
                                   double cell_length) {
  double best = 1e300;
  for (const auto& p : pts) best = std::min(best, std::max(std::fabs(p[0] - c[0]), std::fabs(p[1] - c[1])));
  return std::max(0.0, best / cell_length - 0.5);
}

// predicted: curve points used for matching and the shadow mask (empty => no matching)
inline WavefrontReport wavefront_scan(const Field2D& field, std::size_t row, WindowSpec ws = {}, BandSpec bs = {},
                                      std::vector<std::array<double, 2>> predicted = {}, double shadow_margin_cells = 4.0) {
  const YGrid& g = field.grid;
  const std::size_t N = g.points, W = ws.window, C = ws.cell;
  if (row >= field.x.size()) throw config_error("wavefront_scan: row out of range");
  if (W > N || C > N || C == 0 || W < 8) throw config_error("wavefront_scan: window larger than domain");
  if (N % C != 0) throw config_error("wavefront_scan: cell size must divide the grid");
  WavefrontReport rep;
  rep.x = field.x[row];
  rep.cells_p = rep.cells_n = N / C;
  rep.cell_length = double(C) * g.dy();
  rep.predicted = predicted;
  const std::size_t NC = rep.cells_p * rep.cells_n;
  rep.cls.assign(NC, DecayClass::smooth);
  rep.slope.assign(NC, 0.0);
  rep.shadow.assign(NC, 0);

  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * W * W));
  if (!buf) throw std::bad_alloc();
  fftw_plan plan = fftw_plan_dft_2d(int(W), int(W), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  std::vector<double> hann(W);
  for (std::size_t k = 0; k < W; ++k)
    hann[k] = std::pow(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (double(k) + 0.5) / double(W)), ws.power);
  const double dk = 2.0 * std::numbers::pi / (double(W) * g.dy());
  double k_hi = 0.5 * double(W);
  if (field.epsilon > 0.0) k_hi = std::min(k_hi, bs.max_detaper / (field.epsilon * dk));
  std::vector<double> edges;
  for (double e = bs.k_lo; e <= k_hi * (1 + 1e-12); e *= 2.0) edges.push_back(e);

  std::vector<std::vector<double>> energy(NC);
  std::vector<double> total(NC, 0.0);
  for (std::size_t ci = 0; ci < rep.cells_p; ++ci)
    for (std::size_t cj = 0; cj < rep.cells_n; ++cj) {
      long i0 = long(ci * C + C / 2) - long(W / 2), j0 = long(cj * C + C / 2) - long(W / 2);
      for (std::size_t a = 0; a < W; ++a)
        for (std::size_t b = 0; b < W; ++b) {
          std::size_t i = std::size_t((i0 + long(a) + long(N)) % long(N));
          std::size_t j = std::size_t((j0 + long(b) + long(N)) % long(N));
          cplx v = field.at(row, i, j) * hann[a] * hann[b];
          buf[a * W + b][0] = v.real();
          buf[a * W + b][1] = v.imag();
        }
      fftw_execute(plan);
      std::vector<double> band(edges.size() > 0 ? edges.size() - 1 : 0, 0.0);
      double tot = 0.0;
      for (std::size_t a = 0; a < W; ++a)
        for (std::size_t b = 0; b < W; ++b) {
          double ka = double(a < W / 2 ? long(a) : long(a) - long(W));
          double kb = double(b < W / 2 ? long(b) : long(b) - long(W));
          double km = std::hypot(ka, kb);
          double e = buf[a * W + b][0] * buf[a * W + b][0] + buf[a * W + b][1] * buf[a * W + b][1];
          tot += e;
          for (std::size_t m = 0; m + 1 < edges.size(); ++m)
            if (km >= edges[m] && km < edges[m + 1]) {
              double kap = km * dk;
              band[m] += e * kap * kap * std::exp(2.0 * field.epsilon * field.epsilon * kap * kap);
              break;
            }
        }
      energy[ci * rep.cells_n + cj] = band;
      total[ci * rep.cells_n + cj] = tot;
    }
  fftw_destroy_plan(plan);
  fftw_free(buf);

  double peak = *std::max_element(total.begin(), total.end());
  const std::size_t NB = edges.size() > 0 ? edges.size() - 1 : 0;
  std::vector<double> floor(NB, 1e300);
  for (std::size_t c = 0; c < NC; ++c)
    for (std::size_t m = 0; m < NB; ++m) floor[m] = std::min(floor[m], energy[c][m]);
  double ymax = -1e300;
  for (const auto& p : predicted) ymax = std::max(ymax, p[1]);
  double dsum = 0.0;
  for (std::size_t ci = 0; ci < rep.cells_p; ++ci)
    for (std::size_t cj = 0; cj < rep.cells_n; ++cj) {
      std::size_t c = ci * rep.cells_n + cj;
      if (!predicted.empty()) {
        rep.shadow[c] = g.y(cj * C) >= ymax + shadow_margin_cells * rep.cell_length;
        rep.shadow_cells += rep.shadow[c];
      }
      if (NB < bs.min_bands) {
        rep.cls[c] = DecayClass::inconclusive;
        ++rep.inconclusive_cells;
        continue;
      }
      if (!(total[c] > bs.energy_floor * peak)) continue;
      const auto& band = energy[c];
      std::vector<double> lk, le;
      for (std::size_t m = 0; m < NB; ++m)
        if (band[m] > bs.noise_margin * floor[m] || (floor[m] == 0.0 && band[m] > 0.0)) {
          lk.push_back(std::log(std::sqrt(edges[m] * edges[m + 1])));
          le.push_back(std::log(band[m]));
        }
      // content sinking into the floor before the top band is resolved counts as smooth
      if (lk.size() < bs.min_bands) continue;
      if (bs.fit_bands && lk.size() > bs.fit_bands) {
        lk.erase(lk.begin(), lk.end() - long(bs.fit_bands));
        le.erase(le.begin(), le.end() - long(bs.fit_bands));
      }
      double s = fit_line(lk, le).slope;
      rep.slope[c] = s;
      if (s > bs.threshold) {
        rep.cls[c] = DecayClass::singular;
        ++rep.singular_cells;
        if (rep.shadow[c]) ++rep.shadow_singular;
        if (!predicted.empty()) {
          double d = curve_distance_cells(rep.center(ci, cj, g, C), predicted, rep.cell_length);
          rep.match_distance.push_back(d);
          rep.match_max = std::max(rep.match_max, d);
          dsum += d;
        }
      }
    }
  if (!rep.match_distance.empty()) rep.match_mean = dsum / double(rep.match_distance.size());
  return rep;
}

struct ShadowFit {
  double exponent = 0.0;  // median over columns
  double mean = 0.0;
  std::vector<double> column_exponent;
  std::vector<std::array<double, 2>> column_y;
  std::size_t excluded = 0;
  double x_lo = 0.0, x_hi = 0.0;
};

inline ShadowFit shadow_exponent_fit(const Field2D& field, double beta) {
  if (!(beta > 0.0)) throw domain_error("shadow_exponent_fit: beta must be positive");
  double xmin = 1e300;
  for (double x : field.x)
    if (x > 0.0) xmin = std::min(xmin, x);
  if (!(xmin <= 1e-2)) throw config_error("shadow_exponent_fit: field must reach x <= 1e-2");
  ShadowFit out;
  out.x_lo = xmin;
  out.x_hi = 30.0 * xmin;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < field.x.size(); ++r)
    if (field.x[r] >= xmin && field.x[r] <= out.x_hi * (1 + 1e-12)) rows.push_back(r);
  if (rows.size() < 2) throw config_error("shadow_exponent_fit: need at least two rows in the fit window");
  const YGrid& g = field.grid;
  for (std::size_t i = 0; i < g.points; ++i)
    for (std::size_t j = 0; j < g.points; ++j) {
      if (!(g.y(j) > beta)) continue;
      std::vector<double> lx, lu;
      bool ok = true;
      for (auto r : rows) {
        double m = std::abs(field.at(r, i, j));
        if (!(m > 1e-300) || !std::isfinite(m)) {
          ok = false;
          break;
        }
        lx.push_back(std::log(field.x[r]));
        lu.push_back(std::log(m));
      }
      if (!ok) {
        ++out.excluded;
        continue;
      }
      out.column_exponent.push_back(fit_line(lx, lu).slope);
      out.column_y.push_back({g.y(i), g.y(j)});
    }
  if (out.column_exponent.empty()) throw domain_error("shadow_exponent_fit: no usable columns with y_n > beta");
  std::vector<double> s = out.column_exponent;
  std::nth_element(s.begin(), s.begin() + long(s.size() / 2), s.end());
  out.exponent = s[s.size() / 2];
  double sum = 0.0;
  for (double v : out.column_exponent) sum += v;
  out.mean = sum / double(out.column_exponent.size());
  return out;
}

inline std::vector<double> default_x_rows() {
  auto r = log_grid(0.003, 0.09, 12);
  r.push_back(0.5);
  return r;
}

}  // namespace glance
