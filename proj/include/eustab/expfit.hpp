#pragma once

// Nonlinear least-squares fit of y = alpha * exp(beta * t) with regression
// statistics: parameter covariance, ANOVA, uncorrected R^2 and
// single-prediction intervals.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eustab/error.hpp"
#include "eustab/numeric.hpp"
#include "eustab/student_t.hpp"

namespace eustab {

struct DataPoint {
  double t = 0.0;
  double y = 0.0;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct AnovaTable {
  double ss_model = 0.0;
  double ss_error = 0.0;
  double ss_uncorrected_total = 0.0;
  double ss_corrected_total = 0.0;
  int df_model = 2;
  int df_error = 0;
  int df_uncorrected = 0;
  int df_corrected = 0;

  [[nodiscard]] double ms_model() const noexcept { return ss_model / df_model; }
  [[nodiscard]] double ms_error() const noexcept { return ss_error / df_error; }
};

struct ExpFitModel {
  double alpha = 0.0;
  double beta = 0.0;
  Matrix2 cov{};
  int n = 0;
  int dof = 0;
  double mse = 0.0;
  AnovaTable anova;
  // solver diagnostics
  int iterations = 0;
  double gradient_norm = 0.0;          // |J^T r| at the solution
  double initial_gradient_norm = 0.0;  // |J^T r| at the log-linear start

  [[nodiscard]] double value(double t) const noexcept { return alpha * std::exp(beta * t); }
  [[nodiscard]] double se_alpha() const noexcept { return std::sqrt(cov[0][0]); }
  [[nodiscard]] double se_beta() const noexcept { return std::sqrt(cov[1][1]); }
};

struct FitOptions {
  int max_iterations = 200;
  double param_tolerance = 1e-12;
  double ssr_tolerance = 1e-12;
};

/// d(alpha e^{beta t}) / d(alpha, beta).
inline std::array<double, 2> model_gradient(double alpha, double beta, double t) noexcept {
  const double e = std::exp(beta * t);
  return {e, alpha * t * e};
}

namespace detail {

struct Normal {
  Matrix2 jtj{};
  std::array<double, 2> jtr{};
  double ssr = 0.0;
};

inline Normal normal_equations(std::span<const DataPoint> pts, double alpha, double beta) {
  numeric::CompensatedSum a00, a01, a11, g0, g1, ssr;
  for (const auto& p : pts) {
    const auto g = model_gradient(alpha, beta, p.t);
    const double r = alpha * std::exp(beta * p.t) - p.y;
    a00 += g[0] * g[0];
    a01 += g[0] * g[1];
    a11 += g[1] * g[1];
    g0 += g[0] * r;
    g1 += g[1] * r;
    ssr += r * r;
  }
  Normal ne;
  ne.jtj = {{{a00.value(), a01.value()}, {a01.value(), a11.value()}}};
  ne.jtr = {g0.value(), g1.value()};
  ne.ssr = ssr.value();
  return ne;
}

inline bool nearly_singular(const Matrix2& m) noexcept {
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return !(m[0][0] > 0.0 && m[1][1] > 0.0) || !(det > 1e-13 * m[0][0] * m[1][1]);
}

inline Matrix2 inverse(const Matrix2& m) noexcept {
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

inline double norm(const std::array<double, 2>& v) noexcept { return std::hypot(v[0], v[1]); }

// Ordinary least squares of ln|y| on t over the nonzero responses; alpha
// takes the sign of the data's sum.
inline std::pair<double, double> log_linear_start(std::span<const DataPoint> pts) {
  numeric::CompensatedSum total;
  for (const auto& p : pts) total += p.y;
  const double sign = total.value() < 0.0 ? -1.0 : 1.0;
  numeric::CompensatedSum st, sl, stt, stl;
  int m = 0;
  for (const auto& p : pts) {
    if (p.y == 0.0) continue;
    const double l = std::log(std::abs(p.y));
    st += p.t;
    sl += l;
    stt += p.t * p.t;
    stl += p.t * l;
    ++m;
  }
  const double denom = m * stt.value() - st.value() * st.value();
  if (m < 2 || !(std::abs(denom) > 1e-12 * std::max(1.0, m * stt.value()))) {
    throw Error(errc::singular_jacobian, "need two distinct times with nonzero response");
  }
  const double slope = (m * stl.value() - st.value() * sl.value()) / denom;
  const double intercept = (sl.value() - slope * st.value()) / m;
  return {sign * std::exp(intercept), slope};
}

}  // namespace detail

/// Levenberg-Marquardt with analytic Jacobian and Marquardt diagonal scaling,
/// started from the log-linear least-squares solution. Signed data are fitted
/// as given, so deficits produce negative alpha.
inline ExpFitModel fit_exponential(std::span<const DataPoint> points, const FitOptions& opt = {}) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw Error(errc::invalid_argument, "exponential fit needs at least three points");
  for (const auto& p : points) {
    if (!std::isfinite(p.t) || !std::isfinite(p.y)) {
      throw Error(errc::invalid_argument, "non-finite data point");
    }
  }

  auto [alpha, beta] = detail::log_linear_start(points);
  auto ne = detail::normal_equations(points, alpha, beta);
  if (detail::nearly_singular(ne.jtj)) throw Error(errc::singular_jacobian, "collinear design");

  ExpFitModel model;
  model.initial_gradient_norm = detail::norm(ne.jtr);

  double lambda = 1e-3;
  double nu = 2.0;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations && !converged; ++it) {
    const auto& a = ne.jtj;
    const Matrix2 damped = {{{a[0][0] * (1.0 + lambda), a[0][1]}, {a[1][0], a[1][1] * (1.0 + lambda)}}};
    const auto inv = detail::inverse(damped);
    const double d0 = -(inv[0][0] * ne.jtr[0] + inv[0][1] * ne.jtr[1]);
    const double d1 = -(inv[1][0] * ne.jtr[0] + inv[1][1] * ne.jtr[1]);
    const double na = alpha + d0;
    const double nb = beta + d1;
    const bool small_step = std::abs(d0) <= opt.param_tolerance * std::abs(alpha) &&
                            std::abs(d1) <= opt.param_tolerance * std::abs(beta);
    if (!std::isfinite(na) || !std::isfinite(nb)) {
      lambda *= nu;
      nu *= 2.0;
      continue;
    }
    const auto trial = detail::normal_equations(points, na, nb);
    if (std::isfinite(trial.ssr) && trial.ssr <= ne.ssr) {
      // gain ratio against the linearised model
      const double predicted = d0 * (lambda * a[0][0] * d0 - ne.jtr[0]) +
                               d1 * (lambda * a[1][1] * d1 - ne.jtr[1]);
      const double rho = predicted > 0.0 ? (ne.ssr - trial.ssr) / predicted : 0.0;
      const double rel_ssr = ne.ssr > 0.0 ? (ne.ssr - trial.ssr) / ne.ssr : 0.0;
      const bool exact = trial.ssr <= 1e-28 * std::max(1.0, trial.ssr + trial.jtj[0][0]);
      alpha = na;
      beta = nb;
      ne = trial;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      converged = small_step && (rel_ssr < opt.ssr_tolerance || exact);
    } else {
      // round-off floor: the step no longer changes the parameters
      if (small_step) converged = true;
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e300) break;
    }
  }
  if (!converged) {
    throw Error(errc::no_convergence, "Levenberg-Marquardt stopped after " + std::to_string(it) +
                                          " iterations");
  }
  if (detail::nearly_singular(ne.jtj)) throw Error(errc::singular_jacobian, "collinear design at solution");

  // Undamped Gauss-Newton polish, keeping the iterate with the smallest
  // gradient among those whose SSR agrees to round-off.
  {
    double a = alpha, b = beta;
    auto cur = ne;
    const double ssr_ref = ne.ssr;
    for (int k = 0; k < 40; ++k) {
      const auto inv = detail::inverse(cur.jtj);
      a -= inv[0][0] * cur.jtr[0] + inv[0][1] * cur.jtr[1];
      b -= inv[1][0] * cur.jtr[0] + inv[1][1] * cur.jtr[1];
      cur = detail::normal_equations(points, a, b);
      if (!(cur.ssr <= ssr_ref * (1.0 + 1e-12))) break;
      if (detail::norm(cur.jtr) < detail::norm(ne.jtr)) {
        alpha = a;
        beta = b;
        ne = cur;
      }
    }
  }

  model.alpha = alpha;
  model.beta = beta;
  model.n = n;
  model.dof = n - 2;
  model.iterations = it;
  model.gradient_norm = detail::norm(ne.jtr);

  numeric::CompensatedSum sy, syy;
  for (const auto& p : points) {
    sy += p.y;
    syy += p.y * p.y;
  }
  const double mean = sy.value() / n;
  numeric::CompensatedSum scorr;
  for (const auto& p : points) scorr += (p.y - mean) * (p.y - mean);

  model.mse = ne.ssr / model.dof;
  model.anova.ss_error = ne.ssr;
  model.anova.ss_uncorrected_total = syy.value();
  model.anova.ss_corrected_total = scorr.value();
  model.anova.ss_model = syy.value() - ne.ssr;
  model.anova.df_error = model.dof;
  model.anova.df_uncorrected = n;
  model.anova.df_corrected = n - 1;

  const auto inv = detail::inverse(ne.jtj);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) model.cov[i][j] = model.mse * inv[i][j];
  // exact symmetry
  model.cov[0][1] = model.cov[1][0] = 0.5 * (model.cov[0][1] + model.cov[1][0]);
  return model;
}

/// Two-sided Student-t multiplier for `level` with the model's dof.
inline double interval_multiplier(const ExpFitModel& model, double level) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw Error(errc::invalid_argument, "confidence level must lie in [0, 1)");
  }
  if (level == 0.0) return 0.0;
  return stats::t_quantile(1.0 - (1.0 - level) / 2.0, model.dof);
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct ParameterIntervals {
  Interval alpha;
  Interval beta;
};

inline ParameterIntervals param_confidence_interval(const ExpFitModel& model, double level) {
  const double q = interval_multiplier(model, level);
  return {{model.alpha - q * model.se_alpha(), model.alpha + q * model.se_alpha()},
          {model.beta - q * model.se_beta(), model.beta + q * model.se_beta()}};
}

/// 1 - SS_error / SS_uncorrected_total.
inline double r_squared(const ExpFitModel& model) {
  if (!(model.anova.ss_uncorrected_total > 0.0)) {
    throw Error(errc::degenerate_total, "all-zero response");
  }
  return 1.0 - model.anova.ss_error / model.anova.ss_uncorrected_total;
}

/// Standard error of a single new observation at t: residual variance plus
/// the delta-method variance of the fitted curve.
inline double single_prediction_se(const ExpFitModel& m, double t) {
  const auto g = model_gradient(m.alpha, m.beta, t);
  const double quad = g[0] * (m.cov[0][0] * g[0] + m.cov[0][1] * g[1]) +
                      g[1] * (m.cov[1][0] * g[0] + m.cov[1][1] * g[1]);
  return std::sqrt(m.mse + quad);
}

/// d/dt of single_prediction_se.
inline double single_prediction_se_slope(const ExpFitModel& m, double t) {
  const double e = std::exp(m.beta * t);
  const std::array<double, 2> g = {e, m.alpha * t * e};
  const std::array<double, 2> dg = {m.beta * e, m.alpha * e * (1.0 + m.beta * t)};
  const double cross = g[0] * (m.cov[0][0] * dg[0] + m.cov[0][1] * dg[1]) +
                       g[1] * (m.cov[1][0] * dg[0] + m.cov[1][1] * dg[1]);
  const double se = single_prediction_se(m, t);
  return se > 0.0 ? cross / se : 0.0;
}

struct PredictionRow {
  double t = 0.0;
  std::optional<double> observed;
  double predicted = 0.0;
  double se_single = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.0;
};

inline PredictionRow predict(const ExpFitModel& model, double t, double level) {
  PredictionRow row;
  row.t = t;
  row.level = level;
  row.predicted = model.value(t);
  row.se_single = single_prediction_se(model, t);
  const double half = interval_multiplier(model, level) * row.se_single;
  row.ci_low = row.predicted - half;
  row.ci_high = row.predicted + half;
  return row;
}

/// Prediction rows for integer t in [t_first, t_last], with the observed
/// response filled in where the fitted data has a point at that t.
inline std::vector<PredictionRow> prediction_table(const ExpFitModel& model,
                                                   std::span<const DataPoint> observed,
                                                   int t_first, int t_last, double level) {
  std::vector<PredictionRow> rows;
  for (int t = t_first; t <= t_last; ++t) {
    auto row = predict(model, t, level);
    for (const auto& p : observed)
      if (p.t == t) row.observed = p.y;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eustab
