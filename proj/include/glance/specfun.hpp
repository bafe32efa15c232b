#pragma once

#include <cfloat>
#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace glance {

struct AiryValue {
  double ai;
  double ai_prime;
};

struct HankelValue {
  std::complex<double> h1, h2;
  std::complex<double> h1_prime, h2_prime;
  double order;
  double argument;
};

struct BesselJY {
  double j, y, jp, yp;
};

struct BesselIK {
  double i, k, ip, kp;  // scaled: i*e^{-x}, k*e^{x} when requested
};

namespace detail {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-16;
constexpr double kFpmin = DBL_MIN / kEps;
constexpr int kMaxIt = 100000;

// gam1 = (1/G(1-mu) - 1/G(1+mu))/(2mu), gam2 = (1/G(1-mu) + 1/G(1+mu))/2, |mu| <= 1/2
inline void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  gam2 = 0.5 * (gammi + gampl);
  if (std::fabs(mu) < 0.02) {
    double m2 = mu * mu;
    gam1 = -(0.5772156649015329 - 0.0420026350340952 * m2 - 0.0421977345555443 * m2 * m2 +
             0.0072189432466630 * m2 * m2 * m2);
  } else {
    gam1 = (gammi - gampl) / (2.0 * mu);
  }
}

// J_nu, Y_nu and derivatives, nu >= 0, x > 0.
inline BesselJY bessel_jy(double nu, double x) {
  const double XMIN = 2.0;
  int nl = (x < XMIN) ? int(nu + 0.5) : std::max(0, int(nu - x + 1.5));
  double xmu = nu - nl, xmu2 = xmu * xmu;
  double xi = 1.0 / x, xi2 = 2.0 * xi, w = xi2 / kPi;
  int isign = 1;
  double h = nu * xi;
  if (h < kFpmin) h = kFpmin;
  double b = xi2 * nu, d = 0.0, c = h;
  int i = 0;
  for (; i < kMaxIt; ++i) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < kFpmin) d = kFpmin;
    c = b - 1.0 / c;
    if (std::fabs(c) < kFpmin) c = kFpmin;
    d = 1.0 / d;
    double del = c * d;
    h = del * h;
    if (d < 0.0) isign = -isign;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  if (i >= kMaxIt) throw range_error("bessel_jy: continued fraction failed (x too large)");
  double rjl = isign * kFpmin, rjpl = h * rjl, rjl1 = rjl, rjp1 = rjpl, fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  if (rjl == 0.0) rjl = kEps;
  double f = rjpl / rjl;
  double rjmu, rymu, rymup, ry1;
  if (x < XMIN) {
    double x2 = 0.5 * x, pimu = kPi * xmu;
    double fct = (std::fabs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    d = -std::log(x2);
    double e = xmu * d;
    double fct2 = (std::fabs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(xmu, gam1, gam2, gampl, gammi);
    double ff = 2.0 / kPi * fct * (gam1 * std::cosh(e) + gam2 * fct2 * d);
    e = std::exp(e);
    double p = e / (gampl * kPi);
    double q = 1.0 / (e * kPi * gammi);
    double pimu2 = 0.5 * pimu;
    double fct3 = (std::fabs(pimu2) < kEps) ? 1.0 : std::sin(pimu2) / pimu2;
    double r = kPi * pimu2 * fct3 * fct3;
    c = 1.0;
    d = -x2 * x2;
    double sum = ff + r * q, sum1 = p;
    for (i = 1; i < kMaxIt; ++i) {
      ff = (i * ff + p + q) / (i * double(i) - xmu2);
      c *= d / i;
      p /= (i - xmu);
      q /= (i + xmu);
      double del = c * (ff + r * q);
      sum += del;
      double del1 = c * p - i * del;
      sum1 += del1;
      if (std::fabs(del) < (1.0 + std::fabs(sum)) * kEps) break;
    }
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = xmu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    double a = 0.25 - xmu2, p = -0.5 * xi, q = 1.0;
    double br = 2.0 * x, bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct, ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den, di = -bi / den;
    double dlr = cr * dr - ci * di, dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for (i = 1; i < kMaxIt; ++i) {
      a += 2 * i;
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::fabs(dr) + std::fabs(di) < kFpmin) dr = kFpmin;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::fabs(cr) + std::fabs(ci) < kFpmin) cr = kFpmin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (std::fabs(dlr - 1.0) + std::fabs(dli) < kEps) break;
    }
    double gam = (p - f) / q;
    rjmu = std::sqrt(w / ((p - f) * gam + q));
    rjmu = std::copysign(rjmu, rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = xmu * xi * rymu - rymup;
  }
  double fct = rjmu / rjl;
  BesselJY out;
  out.j = rjl1 * fct;
  out.jp = rjp1 * fct;
  for (int k = 1; k <= nl; ++k) {
    double rytemp = (xmu + k) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  out.y = rymu;
  out.yp = nu * xi * rymu - ry1;
  return out;
}

// I_nu e^{-x}, K_nu e^{x} and derivatives with the same scaling, nu >= 0, x > 0.
inline BesselIK bessel_ik_scaled(double nu, double x) {
  const double XMIN = 2.0;
  int nl = int(nu + 0.5);
  double xmu = nu - nl, xmu2 = xmu * xmu;
  double xi = 1.0 / x, xi2 = 2.0 * xi;
  double h = nu * xi;
  if (h < kFpmin) h = kFpmin;
  double b = xi2 * nu, d = 0.0, c = h;
  int i = 0;
  for (; i < kMaxIt; ++i) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    double del = c * d;
    h = del * h;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  if (i >= kMaxIt) throw range_error("bessel_ik: continued fraction failed");
  double ril = kFpmin, ripl = h * ril, ril1 = ril, rip1 = ripl, fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    double ritemp = fact * ril + ripl;
    fact -= xi;
    ripl = fact * ritemp + ril;
    ril = ritemp;
  }
  double f = ripl / ril;
  double rkmu, rk1;  // scaled by e^{x}
  if (x < XMIN) {
    double x2 = 0.5 * x, pimu = kPi * xmu;
    double fct = (std::fabs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    d = -std::log(x2);
    double e = xmu * d;
    double fct2 = (std::fabs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(xmu, gam1, gam2, gampl, gammi);
    double ff = fct * (gam1 * std::cosh(e) + gam2 * fct2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl, q = 0.5 / (e * gammi);
    c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (i = 1; i < kMaxIt; ++i) {
      ff = (i * ff + p + q) / (i * double(i) - xmu2);
      c *= d / i;
      p /= (i - xmu);
      q /= (i + xmu);
      double del = c * ff;
      sum += del;
      double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    double ex = std::exp(x);
    rkmu = sum * ex;
    rk1 = sum1 * xi2 * ex;
  } else {
    b = 2.0 * (1.0 + x);
    d = 1.0 / b;
    double delh = d;
    h = d;
    double q1 = 0.0, q2 = 1.0, a1 = 0.25 - xmu2;
    double q = a1;
    c = a1;
    double a = -a1, s = 1.0 + q * delh;
    for (i = 1; i < kMaxIt; ++i) {
      a -= 2 * i;
      c = -a * c / (i + 1.0);
      double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      double dels = q * delh;
      s += dels;
      if (std::fabs(dels / s) < kEps) break;
    }
    h = a1 * h;
    rkmu = std::sqrt(kPi / (2.0 * x)) / s;
    rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
  }
  double rkmup = xmu * xi * rkmu - rk1;
  // Wronskian I K' - I' K = -1/x, scaled products are unaffected
  double rimu = xi / (f * rkmu - rkmup);
  BesselIK out;
  out.i = (rimu * ril1) / ril;
  out.ip = (rimu * rip1) / ril;
  for (int k = 1; k <= nl; ++k) {
    double rktemp = (xmu + k) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
  }
  out.k = rkmu;
  out.kp = nu * xi * rkmu - rk1;
  return out;
}

inline void check_order_arg(double order, double t, const char* who) {
  if (!(order >= 0.0 && order <= 5.0)) throw range_error(std::string(who) + ": order outside [0, 5]");
  if (!(t > 1e-6 && t < 1e4)) throw range_error(std::string(who) + ": argument outside (1e-6, 1e4)");
}

// Maclaurin series of Ai, long double, for moderate |z|
inline AiryValue airy_maclaurin(double z) {
  const long double c1 = 0.355028053887817239260063186004183176L;
  const long double c2 = 0.258819403792806798405183560189203963L;
  long double zz = z, z3 = zz * zz * zz;
  // f = sum 3^k (1/3)_k z^{3k}/(3k)!, g = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!
  long double tf = 1.0L, tg = zz, f = tf, g = tg;
  long double fp = 0.0L, gp = 1.0L;
  for (int k = 1; k < 200; ++k) {
    tf *= z3 / ((3.0L * k - 1.0L) * (3.0L * k));
    tg *= z3 / ((3.0L * k) * (3.0L * k + 1.0L));
    f += tf;
    g += tg;
    fp += tf * (3.0L * k) / zz;
    gp += tg * (3.0L * k + 1.0L) / zz;
    if (std::fabs(tf) + std::fabs(tg) < 1e-22L * (std::fabs(f) + std::fabs(g)) && k > 3) break;
  }
  if (zz == 0.0L) fp = 0.0L, gp = 1.0L;
  return {double(c1 * f - c2 * g), double(c1 * fp - c2 * gp)};
}

}  // namespace detail

inline AiryValue airy_ai(double zeta) {
  using detail::kPi;
  if (!(std::fabs(zeta) <= 30.0)) throw range_error("airy_ai: argument outside [-30, 30]");
  if (std::fabs(zeta) <= 2.0) return detail::airy_maclaurin(zeta);
  const double rt3 = std::sqrt(3.0);
  double ax = std::fabs(zeta), rootx = std::sqrt(ax);
  double z = 2.0 / 3.0 * ax * rootx;
  if (zeta > 0.0) {
    auto k13 = detail::bessel_ik_scaled(1.0 / 3.0, z);
    auto k23 = detail::bessel_ik_scaled(2.0 / 3.0, z);
    double ez = std::exp(-z);
    return {rootx / rt3 * k13.k * ez / kPi, -zeta / rt3 * k23.k * ez / kPi};
  }
  auto a = detail::bessel_jy(1.0 / 3.0, z);
  auto b = detail::bessel_jy(2.0 / 3.0, z);
  return {0.5 * rootx * (a.j - a.y / rt3), 0.5 * ax * (b.y / rt3 + b.j)};
}

inline HankelValue hankel_pair(double order, double t) {
  detail::check_order_arg(order, t, "hankel_pair");
  auto v = detail::bessel_jy(order, t);
  HankelValue h;
  h.order = order;
  h.argument = t;
  h.h1 = {v.j, v.y};
  h.h2 = {v.j, -v.y};
  h.h1_prime = {v.jp, v.yp};
  h.h2_prime = {v.jp, -v.yp};
  return h;
}

inline double macdonald(double order, double t) {
  detail::check_order_arg(order, t, "macdonald");
  return detail::bessel_ik_scaled(order, t).k * std::exp(-t);
}

// e^{t} K_order(t): finite for the whole supported range
inline double macdonald_scaled(double order, double t) {
  detail::check_order_arg(order, t, "macdonald_scaled");
  return detail::bessel_ik_scaled(order, t).k;
}

}  // namespace glance
