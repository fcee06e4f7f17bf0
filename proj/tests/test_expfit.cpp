#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace eustab;
using eustab::testing::published_cumulative;
using eustab::testing::published_fit;
using eustab::testing::rel_err;

namespace {

const char* const kRegions[] = {"EU9+", "EU18-", "Eurozone7+", "Eurozone10-"};

double ssr(std::span<const DataPoint> pts, double a, double b) {
  double s = 0.0;
  for (const auto& p : pts) s += std::pow(p.y - a * std::exp(b * p.t), 2);
  return s;
}

// Independent oracle: for fixed beta the best alpha is linear least squares,
// so the fit reduces to a one-dimensional golden-section search on beta.
std::pair<double, double> profile_fit(std::span<const DataPoint> pts) {
  const auto best_alpha = [&](double b) {
    double num = 0.0, den = 0.0;
    for (const auto& p : pts) {
      num += p.y * std::exp(b * p.t);
      den += std::exp(2 * b * p.t);
    }
    return num / den;
  };
  const auto cost = [&](double b) { return ssr(pts, best_alpha(b), b); };
  double lo = 0.0, hi = 1.0;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = cost(x1), f2 = cost(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = cost(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = cost(x2);
    }
  }
  const double b = 0.5 * (lo + hi);
  return {best_alpha(b), b};
}

constexpr double kT975_15 = 2.1314495455597752123;

}  // namespace

TEST(FitExponential, ExactExponential) {
  const std::vector<DataPoint> pts = {{0, 5}, {1, 5 * std::exp(1.0)}, {2, 5 * std::exp(2.0)}};
  const auto m = fit_exponential(pts);
  EXPECT_NEAR(m.alpha, 5.0, 1e-10);
  EXPECT_NEAR(m.beta, 1.0, 1e-12);
  EXPECT_NEAR(m.mse, 0.0, 1e-18);
  EXPECT_NEAR(r_squared(m), 1.0, 1e-15);
  EXPECT_EQ(m.dof, 1);
}

TEST(FitExponential, NegativeData) {
  std::vector<DataPoint> pts;
  for (int t = 0; t < 10; ++t) pts.push_back({double(t), -3.0 * std::exp(0.2 * t) + (t % 2 ? 0.1 : -0.1)});
  const auto m = fit_exponential(pts);
  EXPECT_LT(m.alpha, 0.0);
  EXPECT_NEAR(m.beta, 0.2, 1e-2);
}

TEST(FitExponential, MatchesProfileOracle) {
  for (const char* r : kRegions) {
    const auto pts = published_cumulative(r);
    const auto m = fit_exponential(pts);
    const auto [a, b] = profile_fit(pts);
    EXPECT_LT(rel_err(m.alpha, a), 1e-7) << r;
    EXPECT_LT(rel_err(m.beta, b), 1e-7) << r;
  }
}

TEST(FitExponential, NormalEquationsAtOptimum) {
  for (const char* r : kRegions) {
    const auto pts = published_cumulative(r);
    const auto m = fit_exponential(pts);
    double g0 = 0.0, g1 = 0.0;
    for (const auto& p : pts) {
      const double e = std::exp(m.beta * p.t);
      const double res = p.y - m.alpha * e;
      g0 += e * res;
      g1 += m.alpha * p.t * e * res;
    }
    EXPECT_LE(std::abs(g0), 1e-6) << r;
    EXPECT_LE(std::abs(g1), 1e-6) << r;
    EXPECT_LE(m.gradient_norm, 1e-8 * m.initial_gradient_norm) << r;
  }
}

TEST(FitExponential, AnovaClosure) {
  for (const char* r : kRegions) {
    const auto pts = published_cumulative(r);
    const auto m = fit_exponential(pts);
    double syy = 0.0, sy = 0.0;
    for (const auto& p : pts) {
      syy += p.y * p.y;
      sy += p.y;
    }
    double sc = 0.0;
    for (const auto& p : pts) sc += std::pow(p.y - sy / pts.size(), 2);
    EXPECT_LT(rel_err(m.anova.ss_model + m.anova.ss_error, m.anova.ss_uncorrected_total), 1e-9);
    EXPECT_LT(rel_err(m.anova.ss_uncorrected_total, syy), 1e-12);
    EXPECT_LT(rel_err(m.anova.ss_corrected_total, sc), 1e-10);
    EXPECT_LT(rel_err(m.anova.ss_error, ssr(pts, m.alpha, m.beta)), 1e-9);
    EXPECT_EQ(m.anova.df_error, 15);
    EXPECT_EQ(m.anova.df_uncorrected, 17);
    EXPECT_EQ(m.anova.df_corrected, 16);
    EXPECT_EQ(m.anova.df_model, 2);
    EXPECT_DOUBLE_EQ(m.mse, m.anova.ss_error / 15);
  }
}

TEST(FitExponential, PerturbationNeverImproves) {
  for (const char* r : kRegions) {
    const auto pts = published_cumulative(r);
    const auto m = fit_exponential(pts);
    const double base = ssr(pts, m.alpha, m.beta);
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        if (!da && !db) continue;
        EXPECT_GE(ssr(pts, m.alpha * (1 + 1e-3 * da), m.beta * (1 + 1e-3 * db)), base) << r;
      }
    }
  }
}

TEST(FitExponential, CovarianceIsSymmetricPositive) {
  for (const char* r : kRegions) {
    const auto m = published_fit(r);
    EXPECT_EQ(m.cov[0][1], m.cov[1][0]);
    EXPECT_GT(m.cov[0][0], 0.0);
    EXPECT_GT(m.cov[0][0] * m.cov[1][1] - m.cov[0][1] * m.cov[1][0], 0.0);
  }
}

TEST(FitExponential, Errors) {
  const std::vector<DataPoint> two = {{0, 1}, {1, 2}};
  EXPECT_THROW(fit_exponential(two), Error);
  const std::vector<DataPoint> same_t = {{3, 1}, {3, 2}, {3, 4}};
  try {
    fit_exponential(same_t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::singular_jacobian);
  }
  const auto pts = published_cumulative("EU9+");
  try {
    fit_exponential(pts, FitOptions{2, 1e-12, 1e-12});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::no_convergence);
  }
  const std::vector<DataPoint> zeros = {{0, 0}, {1, 0}, {2, 0}};
  EXPECT_THROW(fit_exponential(zeros), Error);
}

TEST(ModelGradient, MatchesFiniteDifferences) {
  for (const char* r : kRegions) {
    const auto m = published_fit(r);
    for (double t = 0; t <= 25; t += 0.5) {
      const auto g = model_gradient(m.alpha, m.beta, t);
      const double ha = 1e-6 * std::abs(m.alpha), hb = 1e-6 * m.beta;
      const auto f = [t](double a, double b) { return a * std::exp(b * t); };
      const double fa = (f(m.alpha + ha, m.beta) - f(m.alpha - ha, m.beta)) / (2 * ha);
      const double fb = (f(m.alpha, m.beta + hb) - f(m.alpha, m.beta - hb)) / (2 * hb);
      EXPECT_LT(rel_err(g[0], fa), 1e-6);
      if (t > 0) {
        EXPECT_LT(rel_err(g[1], fb), 1e-6);
      }
    }
  }
}

TEST(Predict, HalfWidthIsQuantileTimesSe) {
  for (const char* r : kRegions) {
    const auto pts = published_cumulative(r);
    const auto m = fit_exponential(pts);
    for (const auto& row : prediction_table(m, pts, 0, 20, 0.95)) {
      EXPECT_LT(rel_err(row.ci_high - row.predicted, kT975_15 * row.se_single), 1e-6);
      EXPECT_LT(rel_err(row.predicted - row.ci_low, kT975_15 * row.se_single), 1e-6);
      EXPECT_LT(row.ci_low, row.predicted);
      EXPECT_LT(row.predicted, row.ci_high);
      EXPECT_EQ(row.observed.has_value(), row.t <= 16);
    }
  }
}

TEST(Predict, SeFormula) {
  const auto m = published_fit("EU9+");
  for (double t : {0.0, 7.5, 16.0, 22.0}) {
    const double e = std::exp(m.beta * t);
    const double g0 = e, g1 = m.alpha * t * e;
    const double var = m.mse + g0 * g0 * m.cov[0][0] + 2 * g0 * g1 * m.cov[0][1] + g1 * g1 * m.cov[1][1];
    EXPECT_LT(rel_err(single_prediction_se(m, t), std::sqrt(var)), 1e-12);
    const double h = 1e-5;
    EXPECT_LT(rel_err(single_prediction_se_slope(m, t),
                      (single_prediction_se(m, t + h) - single_prediction_se(m, t - h)) / (2 * h)),
              1e-6);
  }
}

TEST(Predict, SeGrowsBeyondData) {
  for (const char* r : kRegions) {
    const auto m = published_fit(r);
    double prev = single_prediction_se(m, 16.0);
    for (double t = 16.1; t <= 25.0; t += 0.1) {
      const double se = single_prediction_se(m, t);
      EXPECT_GT(se, prev) << r << " t=" << t;
      prev = se;
    }
  }
}

TEST(Predict, PublishedRows) {
  const auto eu9 = published_fit("EU9+");
  const auto row = predict(eu9, 16, 0.95);
  EXPECT_LT(rel_err(row.predicted, 2517.47), 5e-6);
  EXPECT_LT(rel_err(row.se_single, 160.539), 5e-5);
  EXPECT_LT(rel_err(row.ci_low, 2175.29), 5e-5);
  EXPECT_LT(rel_err(row.ci_high, 2859.65), 5e-5);
  EXPECT_LT(rel_err(predict(eu9, 20, 0.95).predicted, 4951.28), 5e-6);
  EXPECT_LT(rel_err(predict(published_fit("Eurozone10-"), 0, 0.95).predicted, -36.5652), 5e-6);
}

TEST(ParameterIntervals, PublishedAndLimit) {
  const auto m = published_fit("EU9+");
  const auto ci = param_confidence_interval(m, 0.95);
  EXPECT_LT(rel_err(ci.alpha.low, 118.48), 5e-5);
  EXPECT_LT(rel_err(ci.alpha.high, 218.018), 5e-6);
  EXPECT_LT(rel_err(ci.beta.low, 0.147742), 5e-6);
  EXPECT_LT(rel_err(ci.beta.high, 0.190454), 5e-6);
  const auto zero = param_confidence_interval(m, 0.0);
  EXPECT_EQ(zero.alpha.low, m.alpha);
  EXPECT_EQ(zero.beta.high, m.beta);
  EXPECT_THROW(param_confidence_interval(m, 1.0), Error);
}

TEST(RSquared, PublishedAndDegenerate) {
  EXPECT_NEAR(r_squared(published_fit("EU9+")), 0.988488, 5e-7);
  EXPECT_NEAR(r_squared(published_fit("Eurozone10-")), 0.967499, 1e-6);
  ExpFitModel zero;
  try {
    r_squared(zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::degenerate_total);
  }
}

TEST(FitExponential, Deterministic) {
  const auto pts = published_cumulative("EU18-");
  const auto a = fit_exponential(pts);
  const auto b = fit_exponential(pts);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.cov, b.cov);
}
