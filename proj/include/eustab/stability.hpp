#pragma once

// Surplus-deficit gap analysis: f(t) = a e^{bt} - c e^{dt} built from a
// surplus fit S(t) = a e^{bt} and a deficit fit D(t) = -c e^{dt}.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "eustab/error.hpp"
#include "eustab/expfit.hpp"
#include "eustab/student_t.hpp"

namespace eustab {

class GapAnalysis {
 public:
  GapAnalysis(ExpFitModel surplus, ExpFitModel deficit)
      : surplus_(std::move(surplus)), deficit_(std::move(deficit)) {
    if (!(surplus_.alpha > 0.0)) throw Error(errc::no_intersection, "surplus model needs alpha > 0");
    if (!(deficit_.alpha < 0.0)) throw Error(errc::no_intersection, "deficit model needs alpha < 0");
    if (!(surplus_.beta > 0.0) || !(deficit_.beta > 0.0)) {
      throw Error(errc::no_intersection, "gap analysis needs positive growth rates");
    }
  }

  [[nodiscard]] const ExpFitModel& surplus() const noexcept { return surplus_; }
  [[nodiscard]] const ExpFitModel& deficit() const noexcept { return deficit_; }
  [[nodiscard]] double a() const noexcept { return surplus_.alpha; }
  [[nodiscard]] double b() const noexcept { return surplus_.beta; }
  [[nodiscard]] double c() const noexcept { return -deficit_.alpha; }
  [[nodiscard]] double d() const noexcept { return deficit_.beta; }

  /// S(t) and |D(t)|.
  [[nodiscard]] double surplus_at(double t) const noexcept { return a() * std::exp(b() * t); }
  [[nodiscard]] double deficit_magnitude_at(double t) const noexcept { return c() * std::exp(d() * t); }

 private:
  ExpFitModel surplus_;
  ExpFitModel deficit_;
};

struct GapValue {
  double f = 0.0;
  double f_t = 0.0;
  double f_tt = 0.0;
};

inline GapValue gap_eval(const GapAnalysis& g, double t) noexcept {
  const double s = g.surplus_at(t);
  const double m = g.deficit_magnitude_at(t);
  return {s - m, g.b() * s - g.d() * m, g.b() * g.b() * s - g.d() * g.d() * m};
}

struct TurningPoints {
  double t0 = 0.0;  // f = 0
  double t1 = 0.0;  // f_t = 0
  double t2 = 0.0;  // f_tt = 0
  double level = 0.0;
};

namespace detail {

// Bisection on a sign change, then one Newton step if it stays inside.
inline double bisect_root(const std::function<double(double)>& fn,
                          const std::function<double(double)>& slope, double lo, double hi) {
  double flo = fn(lo);
  if (flo == 0.0) return lo;
  if (fn(hi) == 0.0) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const double fx = fn(x);
  const double dx = slope(x);
  if (dx != 0.0) {
    const double polished = x - fx / dx;
    if (polished >= lo - 1e-12 && polished <= hi + 1e-12 && std::abs(fn(polished)) <= std::abs(fx)) {
      x = polished;
    }
  }
  return x;
}

// Root of p e^{bt} - q e^{dt} (p, q > 0).
inline std::optional<double> exp_difference_root(double p, double q, double b, double d) {
  if (!(p > 0.0 && q > 0.0) || d == b) return std::nullopt;
  const double t = std::log(p / q) / (d - b);
  if (!std::isfinite(t)) return std::nullopt;
  const auto fn = [&](double x) { return p * std::exp(b * x) - q * std::exp(d * x); };
  const double scale = p * std::exp(b * t) + q * std::exp(d * t);
  if (std::abs(fn(t)) <= 1e-12 * scale) return t;
  // closed form lost accuracy; refine on a bracket around it
  double lo = t - 1.0;
  double hi = t + 1.0;
  for (int i = 0; i < 60 && (fn(lo) < 0.0) == (fn(hi) < 0.0); ++i) {
    lo -= (hi - lo);
    hi += (hi - lo);
  }
  if ((fn(lo) < 0.0) == (fn(hi) < 0.0)) return t;
  return bisect_root(fn, [&](double x) { return p * b * std::exp(b * x) - q * d * std::exp(d * x); },
                     lo, hi);
}

}  // namespace detail

/// Closed-form roots of f, f_t and f_tt, and the level S(t0).
inline TurningPoints turning_points(const GapAnalysis& g) {
  const double a = g.a(), b = g.b(), c = g.c(), d = g.d();
  if (d == b) throw Error(errc::no_intersection, "equal growth rates: the curves never cross");
  const auto t0 = detail::exp_difference_root(a, c, b, d);
  const auto t1 = detail::exp_difference_root(a * b, c * d, b, d);
  const auto t2 = detail::exp_difference_root(a * b * b, c * d * d, b, d);
  if (!t0 || !t1 || !t2) throw Error(errc::no_intersection, "gap function has no finite root");
  return {*t0, *t1, *t2, g.surplus_at(*t0)};
}

enum class Phase { stable_growth, decreasing_stability, increasing_instability };

constexpr std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::stable_growth: return "stable-growth";
    case Phase::decreasing_stability: return "decreasing-stability";
    case Phase::increasing_instability: return "increasing-instability";
  }
  return "?";
}

inline Phase phase_label(const TurningPoints& tp, double t) noexcept {
  if (t < tp.t1) return Phase::stable_growth;
  if (t < tp.t0) return Phase::decreasing_stability;
  return Phase::increasing_instability;
}

inline Phase phase_label(const GapAnalysis& g, double t) { return phase_label(turning_points(g), t); }

/// predicted -/+ t-multiplier * single-prediction SE.
inline Interval band_envelope(const ExpFitModel& model, double t, double band_level) {
  const auto row = predict(model, t, band_level);
  return {row.ci_low, row.ci_high};
}

/// The four band equations whose roots bound the turning time.
enum class BandEquation { surplus_upper, surplus_lower, deficit_upper, deficit_lower };

inline constexpr std::array<BandEquation, 4> kBandEquations = {
    BandEquation::surplus_upper, BandEquation::surplus_lower, BandEquation::deficit_upper,
    BandEquation::deficit_lower};

constexpr std::string_view to_string(BandEquation e) noexcept {
  switch (e) {
    case BandEquation::surplus_upper: return "S+E_S";
    case BandEquation::surplus_lower: return "S-E_S";
    case BandEquation::deficit_upper: return "|D|+E_D";
    case BandEquation::deficit_lower: return "|D|-E_D";
  }
  return "?";
}

/// Band curve (surplus, or deficit magnitude) offset by +/- q * SE.
inline double band_curve(const GapAnalysis& g, BandEquation eq, double q, double t) {
  const bool surplus = eq == BandEquation::surplus_upper || eq == BandEquation::surplus_lower;
  const bool upper = eq == BandEquation::surplus_upper || eq == BandEquation::deficit_upper;
  const auto& m = surplus ? g.surplus() : g.deficit();
  const double centre = surplus ? g.surplus_at(t) : g.deficit_magnitude_at(t);
  const double e = q * single_prediction_se(m, t);
  return upper ? centre + e : centre - e;
}

inline double band_curve_slope(const GapAnalysis& g, BandEquation eq, double q, double t) {
  const bool surplus = eq == BandEquation::surplus_upper || eq == BandEquation::surplus_lower;
  const bool upper = eq == BandEquation::surplus_upper || eq == BandEquation::deficit_upper;
  const auto& m = surplus ? g.surplus() : g.deficit();
  const double centre = surplus ? g.b() * g.surplus_at(t) : g.d() * g.deficit_magnitude_at(t);
  const double e = q * single_prediction_se_slope(m, t);
  return upper ? centre + e : centre - e;
}

struct UncertaintyInterval {
  double t_m = 0.0;
  double t_M = 0.0;
  double band_level = 0.0;
  double joint_level = 0.0;
  /// Root of each band equation nearest t0, if it was bracketed.
  std::array<std::optional<double>, 4> roots{};
};

inline constexpr double kBracketHalfWidth = 15.0;

/// Solves band(t) = S(t0) for each of the four band curves, scanning outward
/// from t0 within t0 +/- 15 for the nearest sign change, then bisecting.
/// Upper bands meet the level before t0, lower bands after it. A band that
/// never reaches the level inside the bracket contributes no root; at least
/// one root must exist on each side of t0.
inline UncertaintyInterval uncertainty_interval(const GapAnalysis& g, double band_level) {
  const auto tp = turning_points(g);
  const double q_surplus = interval_multiplier(g.surplus(), band_level);
  const double q_deficit = interval_multiplier(g.deficit(), band_level);

  UncertaintyInterval out;
  out.band_level = band_level;
  out.joint_level = band_level * band_level;

  constexpr double step = 0.01;
  const int steps = static_cast<int>(kBracketHalfWidth / step);
  for (std::size_t k = 0; k < kBandEquations.size(); ++k) {
    const auto eq = kBandEquations[k];
    const bool surplus = eq == BandEquation::surplus_upper || eq == BandEquation::surplus_lower;
    const double q = surplus ? q_surplus : q_deficit;
    const auto fn = [&](double t) { return band_curve(g, eq, q, t) - tp.level; };
    const auto slope = [&](double t) { return band_curve_slope(g, eq, q, t); };
    const double f0 = fn(tp.t0);
    if (std::abs(f0) <= 1e-12 * tp.level) {
      out.roots[k] = tp.t0;
      continue;
    }
    const double dir = f0 > 0.0 ? -1.0 : 1.0;
    double prev_t = tp.t0;
    double prev_f = f0;
    for (int i = 1; i <= steps; ++i) {
      const double t = tp.t0 + dir * step * i;
      const double ft = fn(t);
      if ((ft < 0.0) != (prev_f < 0.0) || ft == 0.0) {
        out.roots[k] = detail::bisect_root(fn, slope, std::min(prev_t, t), std::max(prev_t, t));
        break;
      }
      prev_t = t;
      prev_f = ft;
    }
  }

  std::optional<double> lo, hi;
  for (const auto& r : out.roots) {
    if (!r) continue;
    if (*r <= tp.t0) lo = lo ? std::min(*lo, *r) : *r;
    if (*r >= tp.t0) hi = hi ? std::max(*hi, *r) : *r;
  }
  if (!lo || !hi) {
    throw Error(errc::root_not_bracketed, "band curves do not reach the turning level within t0 +/- 15");
  }
  out.t_m = *lo;
  out.t_M = *hi;
  return out;
}

/// Per-band confidence at which band equation `eq` has its root exactly at
/// `t`, or nullopt if no level works (the curve lies on the wrong side).
inline std::optional<double> implied_band_level(const GapAnalysis& g, BandEquation eq, double t) {
  const double level = turning_points(g).level;
  const bool surplus = eq == BandEquation::surplus_upper || eq == BandEquation::surplus_lower;
  const bool upper = eq == BandEquation::surplus_upper || eq == BandEquation::deficit_upper;
  const auto& m = surplus ? g.surplus() : g.deficit();
  const double centre = surplus ? g.surplus_at(t) : g.deficit_magnitude_at(t);
  const double q = (upper ? level - centre : centre - level) / single_prediction_se(m, t);
  if (!(q > 0.0)) return std::nullopt;
  return 1.0 - 2.0 * stats::t_tail(q, m.dof);
}

/// Default per-band confidence (joint 0.9801); see `eustab calibrate`.
inline constexpr double kCalibratedBandLevel = 0.99;

struct CalibrationCandidate {
  double t = 0.0;
  BandEquation equation{};
  std::optional<double> band_level;
  /// The interval computed at band_level has this endpoint (within 1e-4).
  bool reproduces = false;
};

/// Implied band level of each upper band at t_m and each lower band at t_M.
inline std::vector<CalibrationCandidate> calibration_candidates(const GapAnalysis& g, double t_m, double t_M) {
  std::vector<CalibrationCandidate> out;
  for (const auto eq : kBandEquations) {
    const bool upper = eq == BandEquation::surplus_upper || eq == BandEquation::deficit_upper;
    CalibrationCandidate c{upper ? t_m : t_M, eq, implied_band_level(g, eq, upper ? t_m : t_M), false};
    if (c.band_level && *c.band_level < 1.0) {
      try {
        const auto ui = uncertainty_interval(g, *c.band_level);
        c.reproduces = std::abs((upper ? ui.t_m : ui.t_M) - c.t) <= 1e-4;
      } catch (const Error&) {
      }
    }
    out.push_back(c);
  }
  return out;
}

/// Mean of the largest group of candidate levels lying within `tol` of each
/// other; ties go to the group with more reproducing candidates.
inline std::optional<double> consensus_band_level(std::span<const CalibrationCandidate> candidates,
                                                  double tol = 1e-3) {
  std::optional<double> best;
  std::pair<int, int> best_score{0, 0};
  for (const auto& anchor : candidates) {
    if (!anchor.band_level) continue;
    int size = 0, hits = 0;
    double sum = 0.0;
    for (const auto& c : candidates) {
      if (!c.band_level || std::abs(*c.band_level - *anchor.band_level) > tol) continue;
      ++size;
      hits += c.reproduces ? 1 : 0;
      sum += *c.band_level;
    }
    if (std::pair{size, hits} > best_score) {
      best_score = {size, hits};
      best = sum / size;
    }
  }
  return best;
}

}  // namespace eustab
