#pragma once

// Student-t distribution: CDF through the regularized incomplete beta
// function and its inverse, with Newton polishing on the t scale.

#include <cmath>
#include <limits>
#include <numbers>

#include "eustab/error.hpp"

namespace eustab::stats {

namespace detail {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a, b), modified Lentz. Converges for x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(errc::invalid_argument, "incomplete_beta: parameters out of domain");
  }
  if (x == 0.0 || x == 1.0) return x;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - detail::log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

inline double t_pdf(double t, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(t * t / dof));
}

/// P(T > |t|), computed without cancellation.
inline double t_tail(double t, double dof) {
  if (!(dof > 0.0)) throw Error(errc::invalid_argument, "t_tail: dof must be positive");
  if (t == 0.0) return 0.5;
  return 0.5 * incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

/// P(0 < T < |t|), accurate for small t.
inline double t_central(double t, double dof) {
  if (!(dof > 0.0)) throw Error(errc::invalid_argument, "t_central: dof must be positive");
  const double t2 = t * t;
  return 0.5 * incomplete_beta(0.5, 0.5 * dof, t2 / (dof + t2));
}

/// Lower tail P(T <= t) for T ~ Student-t(dof).
inline double t_cdf(double t, double dof) {
  const double tail = t_tail(t, dof);
  return t > 0.0 ? 1.0 - tail : tail;
}

/// Inverse regularized incomplete beta: x with I_x(a, b) = p.
inline double inverse_incomplete_beta(double a, double b, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(errc::invalid_argument, "inverse_incomplete_beta: p outside [0, 1]");
  }
  if (p == 0.0 || p == 1.0) return p;

  // Initial guess (Abramowitz & Stegun 26.5.22 / Numerical Recipes invbetai).
  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double pp = p < 0.5 ? p : 1.0 - p;
    const double tt = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + tt * 0.27061) / (1.0 + tt * (0.99229 + tt * 0.04481)) - tt;
    if (p < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                         (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    x = p < t / w ? std::pow(a * w * p, 1.0 / a) : 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
  }

  // Safeguarded Halley iterations on I_x - p, keeping a valid bracket.
  double lo = 0.0;
  double hi = 1.0;
  const double afac = -detail::log_beta(a, b);
  for (int it = 0; it < 200; ++it) {
    if (!(x > 0.0 && x < 1.0)) x = 0.5 * (lo + hi);
    const double err = incomplete_beta(a, b, x) - p;
    if (err < 0.0) lo = x; else hi = x;
    const double dens = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + afac);
    double step = err / dens;
    const double corr = step * ((a - 1.0) / x - (b - 1.0) / (1.0 - x));
    if (std::abs(corr) < 1.0) step /= (1.0 - 0.5 * corr);
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-17 + 1e-15 * x || hi - lo < 1e-300) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

/// Inverse CDF of Student-t with `dof` degrees of freedom, 0 < p < 1.
inline double t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw Error(errc::invalid_argument, "t_quantile: p must lie in (0, 1)");
  if (!(dof > 0.0)) throw Error(errc::invalid_argument, "t_quantile: dof must be positive");
  if (p == 0.5) return 0.0;
  const double tail = p < 0.5 ? p : 1.0 - p;
  double t = 0.0;
  if (tail > 0.25) {
    // Near the median: P(|T| < t) = I_y(1/2, dof/2) with y = t^2 / (dof + t^2);
    // p - 0.5 is exact here, so small quantiles keep full relative precision.
    const double mass = std::abs(p - 0.5);
    const double y = inverse_incomplete_beta(0.5, 0.5 * dof, 2.0 * mass);
    t = std::sqrt(dof * y / (1.0 - y));
    for (int it = 0; it < 3 && t > 0.0; ++it) {
      const double step = (mass - t_central(t, dof)) / t_pdf(t, dof);
      t += step;
      if (std::abs(step) <= 1e-15 * std::abs(t)) break;
    }
  } else {
    // P(|T| > t) = I_x(dof/2, 1/2) with x = dof / (dof + t^2)
    const double x = inverse_incomplete_beta(0.5 * dof, 0.5, 2.0 * tail);
    t = x > 0.0 ? std::sqrt(dof * (1.0 - x) / x) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(t)) return p < 0.5 ? -t : t;
    // Newton polish on the upper-tail equation in t, where cancellation is mild.
    for (int it = 0; it < 3; ++it) {
      const double step = (t_tail(t, dof) - tail) / t_pdf(t, dof);
      t += step;
      if (std::abs(step) <= 1e-15 * std::abs(t)) break;
    }
  }
  return p < 0.5 ? -t : t;
}

}  // namespace eustab::stats
