#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace glance {

// Running integral F_i = int_{x_0}^{x_i} f on a uniform grid, fourth order.
template <class T>
std::vector<T> cumulative_integral(const std::vector<T>& f, double dx) {
  std::size_t n = f.size();
  std::vector<T> F(n, T{});
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
    return F;
  }
  const double c = dx / 24.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    T piece;
    if (i == 0)
      piece = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    else if (i + 2 == n)
      piece = c * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
    else
      piece = c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    F[i + 1] = F[i] + piece;
  }
  return F;
}

// Fourth-order first derivative on a uniform grid, one-sided at the ends.
template <class T>
std::vector<T> diff1(const std::vector<T>& f, double dx) {
  std::size_t n = f.size();
  if (n < 5) throw config_error("diff1: need at least 5 points");
  std::vector<T> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dx);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx);
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dx);
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * dx);
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * dx);
  return d;
}

// Fourth-order second derivative on a uniform grid, one-sided at the ends.
template <class T>
std::vector<T> diff2(const std::vector<T>& f, double dx) {
  std::size_t n = f.size();
  if (n < 6) throw config_error("diff2: need at least 6 points");
  std::vector<T> d(n);
  double h2 = dx * dx;
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2);
  d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / (12.0 * h2);
  d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) / (12.0 * h2);
  d[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5] -
              10.0 * f[n - 6]) / (12.0 * h2);
  d[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]) /
             (12.0 * h2);
  return d;
}

namespace detail {

// weights w_j (j = 0..5) with int_0^1 p = sum w_j p(offset + j) for quintic p
inline const std::array<double, 6>& interval_weights(int offset) {
  static const auto table = [] {
    std::array<std::array<double, 6>, 6> t{};
    for (int o = 0; o < 6; ++o) {
      int off = -o;
      double M[6][7];
      for (int m = 0; m < 6; ++m) {
        for (int j = 0; j < 6; ++j) M[m][j] = std::pow(double(off + j), m);
        M[m][6] = 1.0 / (m + 1);
      }
      for (int c = 0; c < 6; ++c) {
        int piv = c;
        for (int r = c + 1; r < 6; ++r)
          if (std::fabs(M[r][c]) > std::fabs(M[piv][c])) piv = r;
        for (int k = 0; k < 7; ++k) std::swap(M[c][k], M[piv][k]);
        for (int r = 0; r < 6; ++r) {
          if (r == c) continue;
          double f = M[r][c] / M[c][c];
          for (int k = c; k < 7; ++k) M[r][k] -= f * M[c][k];
        }
      }
      for (int j = 0; j < 6; ++j) t[o][j] = M[j][6] / M[j][j];
    }
    return t;
  }();
  return table[-offset];
}

// stencil start (relative to i) for the interval [i, i+1] in a grid of n points
inline int stencil_offset(std::size_t i, std::size_t n) {
  long lo = long(i) - 2;
  if (lo < 0) lo = 0;
  if (lo + 5 > long(n) - 1) lo = long(n) - 6;
  return int(lo - long(i));
}

}  // namespace detail

// Sixth-order running integral on a uniform grid (n >= 6).
template <class T>
std::vector<T> cumulative_integral6(const std::vector<T>& f, double dx) {
  std::size_t n = f.size();
  if (n < 6) return cumulative_integral(f, dx);
  std::vector<T> F(n, T{});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    int off = detail::stencil_offset(i, n);
    const auto& w = detail::interval_weights(off);
    T piece{};
    for (int j = 0; j < 6; ++j) piece += w[j] * f[i + off + j];
    F[i + 1] = F[i] + dx * piece;
  }
  return F;
}

// L_i = int_{x_0}^{x_i} exp(-a (x_i - x')) f(x') dx' on a uniform grid, Re a >= 0.
inline std::vector<std::complex<double>> exp_kernel_left(const std::vector<std::complex<double>>& f, double dx,
                                                         std::complex<double> a) {
  std::size_t n = f.size();
  if (n < 6) throw config_error("exp_kernel_left: need at least 6 points");
  std::vector<std::complex<double>> L(n);
  std::array<std::complex<double>, 12> ex;
  for (int k = 0; k < 12; ++k) ex[k] = std::exp(-a * dx * double(k - 6));  // exp(-a dx m), m = k-6
  for (std::size_t i = 0; i + 1 < n; ++i) {
    int off = detail::stencil_offset(i, n);
    const auto& w = detail::interval_weights(off);
    std::complex<double> piece{};
    for (int j = 0; j < 6; ++j) {
      int m = 1 - (off + j);  // (i+1) - node
      piece += w[j] * ex[m + 6] * f[i + off + j];
    }
    L[i + 1] = ex[7] * L[i] + dx * piece;
  }
  return L;
}

// R_i = int_{x_i}^{x_end} exp(-a (x' - x_i)) f(x') dx'
inline std::vector<std::complex<double>> exp_kernel_right(std::vector<std::complex<double>> f, double dx,
                                                          std::complex<double> a) {
  std::reverse(f.begin(), f.end());
  auto R = exp_kernel_left(f, dx, a);
  std::reverse(R.begin(), R.end());
  return R;
}

// Sixth-order centered second derivative; ends left at zero.
template <class T>
std::vector<T> diff2_interior6(const std::vector<T>& f, double dx) {
  std::size_t n = f.size();
  std::vector<T> d(n, T{});
  for (std::size_t i = 3; i + 3 < n; ++i)
    d[i] = (2.0 * f[i - 3] - 27.0 * f[i - 2] + 270.0 * f[i - 1] - 490.0 * f[i] + 270.0 * f[i + 1] -
            27.0 * f[i + 2] + 2.0 * f[i + 3]) / (180.0 * dx * dx);
  return d;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::size_t count = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  std::size_t n = x.size();
  f.count = n;
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

inline std::vector<double> log_grid(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
  return g;
}

}  // namespace glance
