#pragma once

// Report tables (plain-csv and aligned text) for balances, fits and the
// stability analysis, plus plot-data series.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "eustab/accounting.hpp"
#include "eustab/dataset.hpp"
#include "eustab/expfit.hpp"
#include "eustab/format.hpp"
#include "eustab/regions.hpp"
#include "eustab/stability.hpp"

namespace eustab {

struct ReportTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::string to_csv(const ReportTable& table) {
  const auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + '\n';
  };
  std::string out = join(table.columns);
  for (const auto& r : table.rows) out += join(r);
  return out;
}

/// Right-aligned columns under the title; `emphasis` wraps the header in
/// ANSI bold (terminal output only).
inline std::string to_text(const ReportTable& table, bool emphasis = false) {
  std::vector<std::size_t> width(table.columns.size());
  for (std::size_t i = 0; i < width.size(); ++i) width[i] = table.columns[i].size();
  for (const auto& r : table.rows)
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string& c = i < cells.size() ? cells[i] : std::string();
      if (i) s += "  ";
      s += std::string(width[i] - c.size(), ' ') + c;
    }
    return s + '\n';
  };
  std::string out;
  if (!table.title.empty()) out += table.title + "\n\n";
  out += emphasis ? "\x1b[1m" + line(table.columns).substr(0, line(table.columns).size() - 1) + "\x1b[0m\n"
                  : line(table.columns);
  for (const auto& r : table.rows) out += line(r);
  return out;
}

namespace detail {

inline std::string cell(double v) { return format_sig(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(const std::optional<double>& v) { return v ? format_sig(*v) : std::string(); }

inline std::vector<int> common_years(const Dataset& ds) { return {ds.years().begin(), ds.years().end()}; }

}  // namespace detail

inline ReportTable totals_report(const Dataset& ds, const RegionCatalog& cat, Period period = {}) {
  std::vector<std::string> codes(ds.countries().begin(), ds.countries().end());
  std::sort(codes.begin(), codes.end(), [](const std::string& a, const std::string& b) {
    return country_display_name(a) < country_display_name(b);
  });
  const auto rows = totals_table(ds, codes, period);
  ReportTable t{"Total balances by member state, " + std::to_string(period.first_year) + "-" +
                    std::to_string(period.last_year) + " (billion EUR)",
                {"country", "cab_total", "R", "ggb_total", "R1", "psb_total", "R2"},
                {}};
  for (const auto& r : rows) {
    t.rows.push_back({country_display_name(r.subject), detail::cell(r.cab_total), detail::cell(r.rank_cab),
                      detail::cell(r.ggb_total), detail::cell(r.rank_ggb), detail::cell(r.psb_total),
                      detail::cell(r.rank_psb)});
  }
  if (cat.contains("EU27")) {
    const auto all = region_totals(ds, cat.at("EU27"), period);
    t.rows.push_back({"EU27", detail::cell(all.cab), "", detail::cell(all.ggb), "", detail::cell(all.psb), ""});
  }
  return t;
}

inline ReportTable region_totals_report(const Dataset& ds, const RegionCatalog& cat,
                                        const std::vector<std::string>& subjects, std::string title,
                                        Period period = {}) {
  ReportTable t{std::move(title), {"region", "cab_total", "ggb_total", "psb_total"}, {}};
  for (const auto& s : subjects) {
    const auto r = region_totals(ds, cat.resolve(s, ds), period);
    t.rows.push_back({s, detail::cell(r.cab), detail::cell(r.ggb), detail::cell(r.psb)});
  }
  return t;
}

/// GDP share of the `count` largest economies (by GDP in the last year),
/// plus their combined share.
inline ReportTable top_gdp_share_report(const Dataset& ds, const RegionCatalog& cat, std::size_t count = 6) {
  const auto years = detail::common_years(ds);
  const int last = years.back();
  std::vector<std::string> codes(ds.countries().begin(), ds.countries().end());
  std::stable_sort(codes.begin(), codes.end(), [&](const std::string& a, const std::string& b) {
    return ds.find(a, last)->gdp > ds.find(b, last)->gdp;
  });
  codes.resize(std::min(count, codes.size()));
  const auto& universe = cat.at("EU27");
  ReportTable t{"GDP share of the largest economies", {"year", "t"}, {}};
  for (const auto& c : codes) t.columns.push_back("gdp_share:" + country_display_name(c));
  t.columns.push_back("gdp_share:Total");
  const RegionDefinition group("top", {codes.begin(), codes.end()});
  for (int y : years) {
    std::vector<std::string> row = {detail::cell(y), detail::cell(year_to_t(y))};
    for (const auto& c : codes) row.push_back(detail::cell(gdp_share(ds, RegionDefinition(c, {c}), y, universe)));
    row.push_back(detail::cell(gdp_share(ds, group, y, universe)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

enum class AnnualQuantity { gdp, gdp_share, cab, cab_ratio };

/// year, t, then one column per (subject, quantity).
inline ReportTable annual_report(const Dataset& ds, const RegionCatalog& cat, std::string title,
                                 const std::vector<std::pair<std::string, AnnualQuantity>>& columns) {
  ReportTable t{std::move(title), {"year", "t"}, {}};
  std::vector<BalanceSeries> series;
  for (const auto& [subject, q] : columns) {
    const auto region = cat.resolve(subject, ds);
    switch (q) {
      case AnnualQuantity::gdp:
        t.columns.push_back("gdp:" + subject);
        series.push_back(region_series(ds, region, BalanceKind::gdp, SeriesMode::annual));
        break;
      case AnnualQuantity::gdp_share: {
        t.columns.push_back("gdp_share:" + subject);
        BalanceSeries s{subject, BalanceKind::gdp, SeriesMode::annual, {}};
        for (int y : ds.years()) s.points.push_back({year_to_t(y), gdp_share(ds, region, y, cat.at("EU27"))});
        series.push_back(std::move(s));
        break;
      }
      case AnnualQuantity::cab:
        t.columns.push_back("cab:" + subject);
        series.push_back(region_series(ds, region, BalanceKind::cab, SeriesMode::annual));
        break;
      case AnnualQuantity::cab_ratio:
        t.columns.push_back("cab_ratio:" + subject);
        series.push_back(gdp_ratio_series(ds, region));
        break;
    }
  }
  for (int y : ds.years()) {
    std::vector<std::string> row = {detail::cell(y), detail::cell(year_to_t(y))};
    for (const auto& s : series) row.push_back(detail::cell(s.at(year_to_t(y))));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline constexpr int kReportTableCount = 12;

/// Report tables 1-12 over the bundled region names.
inline ReportTable report_table(int id, const Dataset& ds, const RegionCatalog& cat) {
  using Q = AnnualQuantity;
  const auto pairs = [](std::initializer_list<const char*> subjects, std::initializer_list<Q> qs) {
    std::vector<std::pair<std::string, Q>> out;
    for (const char* s : subjects)
      for (Q q : qs) out.emplace_back(s, q);
    return out;
  };
  switch (id) {
    case 1: return totals_report(ds, cat);
    case 2:
      return region_totals_report(ds, cat, {"Eurozone", "EU10", "EU9+", "EU18-", "Germany", "EU26", "EU27"},
                                  "Total balances of complementary EU pairs (billion EUR)");
    case 3:
      return region_totals_report(ds, cat, {"Eurozone7+", "Eurozone10-", "Germany", "Eurozone16", "Eurozone"},
                                  "Total balances of complementary Eurozone pairs (billion EUR)");
    case 4:
      return region_totals_report(ds, cat, {"Germany", "Eurozone6+", "Eurozone10-", "EU10", "EU27"},
                                  "Total balances of four EU regions (billion EUR)");
    case 5: return top_gdp_share_report(ds, cat);
    case 6:
      return annual_report(ds, cat, "GDP of the main EU regions (billion EUR)",
                           pairs({"EU9+", "EU18-", "Germany", "EU26", "Eurozone6+", "Eurozone10-", "Eurozone",
                                  "EU10", "EU27"},
                                 {Q::gdp}));
    case 7:
      return annual_report(ds, cat, "GDP share of the main EU regions",
                           pairs({"EU9+", "EU18-", "Germany", "EU26", "Eurozone6+", "Eurozone10-", "Eurozone",
                                  "EU10"},
                                 {Q::gdp_share}));
    case 8:
      return annual_report(ds, cat, "Annual CAB of four EU regions (billion EUR)",
                           pairs({"Germany", "Eurozone6+", "Eurozone10-", "EU10", "EU27"}, {Q::cab}));
    case 9:
      return annual_report(ds, cat, "Annual CAB / GDP of four EU regions",
                           pairs({"Germany", "Eurozone6+", "Eurozone10-", "EU10", "EU27"}, {Q::cab_ratio}));
    case 10:
      return annual_report(ds, cat, "Annual CAB of the surplus and deficit EU countries",
                           pairs({"EU9+", "EU18-", "EU27"}, {Q::cab, Q::cab_ratio}));
    case 11:
      return annual_report(ds, cat, "Annual CAB of Germany and the rest of the EU",
                           pairs({"Germany", "EU26", "EU27"}, {Q::cab, Q::cab_ratio}));
    case 12:
      return annual_report(ds, cat, "Annual CAB of the surplus and deficit Eurozone countries",
                           pairs({"Eurozone7+", "Eurozone10-", "Eurozone"}, {Q::cab, Q::cab_ratio}));
    default: throw Error(errc::invalid_argument, "report table id must be 1-12");
  }
}

// ---------------------------------------------------------------------------
// Fits

/// Cumulative CAB of a region as (t, value) fitting data.
inline std::vector<DataPoint> cumulative_points(const Dataset& ds, const RegionDefinition& region) {
  const auto s = region_series(ds, region, BalanceKind::cab, SeriesMode::cumulative);
  std::vector<DataPoint> pts;
  for (const auto& p : s.points) pts.push_back({static_cast<double>(p.t), p.value});
  return pts;
}

inline ReportTable model_summary_report(const std::string& subject, const ExpFitModel& m, double level) {
  const auto ci = param_confidence_interval(m, level);
  ReportTable t{"Exponential fit alpha*exp(beta*t) of cumulative CAB: " + subject, {"quantity", "value"}, {}};
  const auto add = [&](const std::string& k, const std::string& v) { t.rows.push_back({k, v}); };
  using detail::cell;
  add("alpha", cell(m.alpha));
  add("alpha_se", cell(m.se_alpha()));
  add("alpha_ci_low", cell(ci.alpha.low));
  add("alpha_ci_high", cell(ci.alpha.high));
  add("beta", cell(m.beta));
  add("beta_se", cell(m.se_beta()));
  add("beta_ci_low", cell(ci.beta.low));
  add("beta_ci_high", cell(ci.beta.high));
  add("level", cell(level));
  add("df_model", cell(m.anova.df_model));
  add("ss_model", cell(m.anova.ss_model));
  add("ms_model", cell(m.anova.ms_model()));
  add("df_error", cell(m.anova.df_error));
  add("ss_error", cell(m.anova.ss_error));
  add("ms_error", cell(m.anova.ms_error()));
  add("df_uncorrected_total", cell(m.anova.df_uncorrected));
  add("ss_uncorrected_total", cell(m.anova.ss_uncorrected_total));
  add("df_corrected_total", cell(m.anova.df_corrected));
  add("ss_corrected_total", cell(m.anova.ss_corrected_total));
  add("r_squared", cell(r_squared(m)));
  add("iterations", cell(m.iterations));
  return t;
}

inline ReportTable prediction_report(const std::string& subject, const std::vector<PredictionRow>& rows) {
  ReportTable t{"Single-prediction intervals: " + subject,
                {"year", "t", "observed", "predicted", "se", "ci_low", "ci_high"},
                {}};
  for (const auto& r : rows) {
    const int ti = static_cast<int>(std::lround(r.t));
    t.rows.push_back({detail::cell(t_to_year(ti)), detail::cell(ti), detail::cell(r.observed),
                      detail::cell(r.predicted), detail::cell(r.se_single), detail::cell(r.ci_low),
                      detail::cell(r.ci_high)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Stability

/// Calendar year nearest to time t.
inline int calendar_year(double t) { return t_to_year(static_cast<int>(std::lround(t))); }

inline ReportTable stability_report(const std::string& scope, const GapAnalysis& g, const TurningPoints& tp,
                                    const UncertaintyInterval& ui, int latest_t) {
  ReportTable t{"Surplus-deficit gap analysis: " + scope, {"quantity", "value"}, {}};
  const auto add = [&](const std::string& k, const std::string& v) { t.rows.push_back({k, v}); };
  using detail::cell;
  add("a", cell(g.a()));
  add("b", cell(g.b()));
  add("c", cell(g.c()));
  add("d", cell(g.d()));
  add("t0", cell(tp.t0));
  add("t0_year", cell(calendar_year(tp.t0)));
  add("t1", cell(tp.t1));
  add("t1_year", cell(calendar_year(tp.t1)));
  add("t2", cell(tp.t2));
  add("t2_year", cell(calendar_year(tp.t2)));
  add("level", cell(tp.level));
  add("band_level", cell(ui.band_level));
  add("joint_level", cell(ui.joint_level));
  for (std::size_t k = 0; k < kBandEquations.size(); ++k) {
    add(std::string("root ") + std::string(to_string(kBandEquations[k])), cell(ui.roots[k]));
  }
  add("t_m", cell(ui.t_m));
  add("t_m_year", cell(calendar_year(ui.t_m)));
  add("t_M", cell(ui.t_M));
  add("t_M_year", cell(calendar_year(ui.t_M)));
  add("latest_year", cell(t_to_year(latest_t)));
  add("phase_latest_year", std::string(to_string(phase_label(tp, latest_t))));
  return t;
}

/// t grid of step 0.05 over [0, 25].
inline std::vector<double> plot_grid() {
  std::vector<double> ts;
  for (int i = 0; i <= 500; ++i) ts.push_back(0.05 * i);
  return ts;
}

/// S(t), -S(t) and D(t).
inline ReportTable accumulation_plot(const GapAnalysis& g) {
  ReportTable t{"", {"t", "S", "minus_S", "D"}, {}};
  for (double x : plot_grid()) {
    const double s = g.surplus_at(x);
    t.rows.push_back({detail::cell(x), detail::cell(s), detail::cell(-s), detail::cell(g.deficit().value(x))});
  }
  return t;
}

inline ReportTable gap_plot(const GapAnalysis& g) {
  ReportTable t{"", {"t", "f", "f_t", "f_tt"}, {}};
  for (double x : plot_grid()) {
    const auto v = gap_eval(g, x);
    t.rows.push_back({detail::cell(x), detail::cell(v.f), detail::cell(v.f_t), detail::cell(v.f_tt)});
  }
  return t;
}

/// S and |D| with their bands and the turning level.
inline ReportTable band_plot(const GapAnalysis& g, double level, double band_level) {
  ReportTable t{"", {"t", "S", "S_low", "S_high", "D_abs", "D_abs_low", "D_abs_high", "level"}, {}};
  for (double x : plot_grid()) {
    const auto s = band_envelope(g.surplus(), x, band_level);
    const auto d = band_envelope(g.deficit(), x, band_level);
    t.rows.push_back({detail::cell(x), detail::cell(g.surplus_at(x)), detail::cell(s.low), detail::cell(s.high),
                      detail::cell(g.deficit_magnitude_at(x)), detail::cell(-d.high), detail::cell(-d.low),
                      detail::cell(level)});
  }
  return t;
}

}  // namespace eustab
