#pragma once

// Balance identity, additive aggregation over country groupings, ranked
// totals, GDP shares and endpoint average rates.

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "eustab/dataset.hpp"
#include "eustab/error.hpp"
#include "eustab/numeric.hpp"

namespace eustab {

enum class BalanceKind { cab, ggb, psb, gdp };
enum class SeriesMode { annual, cumulative };

constexpr std::string_view to_string(BalanceKind k) noexcept {
  switch (k) {
    case BalanceKind::cab: return "CAB";
    case BalanceKind::ggb: return "GGB";
    case BalanceKind::psb: return "PSB";
    case BalanceKind::gdp: return "GDP";
  }
  return "?";
}

/// A named, non-empty set of country codes.
class RegionDefinition {
 public:
  RegionDefinition(std::string name, std::set<std::string> members)
      : name_(std::move(name)), members_(std::move(members)) {
    if (members_.empty()) throw Error(errc::empty_region, "region '" + name_ + "' has no members");
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::set<std::string>& members() const noexcept { return members_; }
  [[nodiscard]] bool contains(const std::string& c) const { return members_.count(c) != 0; }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }

  friend bool operator==(const RegionDefinition& a, const RegionDefinition& b) {
    return a.members_ == b.members_;
  }

 private:
  std::string name_;
  std::set<std::string> members_;
};

/// Throws NotSubset when a member does not occur in the dataset.
inline void validate_region(const RegionDefinition& region, const Dataset& ds) {
  for (const auto& c : region.members()) {
    if (!ds.has_country(c)) {
      throw Error(errc::not_subset, "region '" + region.name() + "' member " + c + " not in dataset");
    }
  }
}

/// Members of `universe` not in `region`.
inline RegionDefinition complement(const RegionDefinition& region, const RegionDefinition& universe,
                                   std::string name) {
  std::set<std::string> rest;
  for (const auto& c : region.members()) {
    if (!universe.contains(c)) {
      throw Error(errc::not_subset, c + " of '" + region.name() + "' is outside '" +
                                        universe.name() + "'");
    }
  }
  std::set_difference(universe.members().begin(), universe.members().end(),
                      region.members().begin(), region.members().end(),
                      std::inserter(rest, rest.end()));
  return RegionDefinition(std::move(name), std::move(rest));
}

struct SeriesPoint {
  int t = 0;
  double value = 0.0;
};

struct BalanceSeries {
  std::string subject;
  BalanceKind kind = BalanceKind::cab;
  SeriesMode mode = SeriesMode::annual;
  std::vector<SeriesPoint> points;

  [[nodiscard]] std::optional<double> at(int t) const {
    for (const auto& p : points)
      if (p.t == t) return p.value;
    return std::nullopt;
  }
};

inline constexpr double psb(double cab, double ggb) noexcept { return cab - ggb; }

inline std::optional<double> record_value(const CountryYearRecord& rec, BalanceKind kind) {
  switch (kind) {
    case BalanceKind::cab: return rec.cab_eur;
    case BalanceKind::ggb: return rec.ggb_eur;
    case BalanceKind::psb: return rec.psb_eur;
    case BalanceKind::gdp: return rec.gdp;
  }
  return std::nullopt;
}

/// Annual value at t is the algebraic sum of the members reporting at t;
/// members without data that year contribute nothing. Years with no
/// reporting member are skipped.
inline BalanceSeries region_series(const Dataset& ds, const RegionDefinition& region,
                                   BalanceKind kind, SeriesMode mode) {
  validate_region(region, ds);
  BalanceSeries series{region.name(), kind, mode, {}};
  numeric::CompensatedSum running;
  for (int year : ds.years()) {
    numeric::CompensatedSum sum;
    bool any = false;
    for (const auto& c : region.members()) {
      const auto* rec = ds.find(c, year);
      if (!rec) continue;
      if (const auto v = record_value(*rec, kind)) {
        sum += *v;
        any = true;
      }
    }
    if (!any) continue;
    double value = sum.value();
    if (mode == SeriesMode::cumulative) {
      running += value;
      value = running.value();
    }
    series.points.push_back({year_to_t(year), value});
  }
  if (series.points.empty()) {
    throw Error(errc::empty_intersection,
                "no member of '" + region.name() + "' has " + std::string(to_string(kind)) + " data");
  }
  return series;
}

/// Region CAB (or another balance) divided by the region's GDP, per year.
inline BalanceSeries gdp_ratio_series(const Dataset& ds, const RegionDefinition& region,
                                      BalanceKind kind = BalanceKind::cab) {
  auto balance = region_series(ds, region, kind, SeriesMode::annual);
  const auto gdp = region_series(ds, region, BalanceKind::gdp, SeriesMode::annual);
  for (auto& p : balance.points) {
    const auto g = gdp.at(p.t);
    if (!g || *g <= 0.0) {
      throw Error(errc::missing_gdp, "no GDP for '" + region.name() + "' in " +
                                         std::to_string(t_to_year(p.t)));
    }
    p.value /= *g;
  }
  return balance;
}

struct Period {
  int first_year = kBaseYear;
  int last_year = 2011;
};

struct RegionTotals {
  double cab = 0.0;
  double ggb = 0.0;
  double psb = 0.0;
};

inline RegionTotals region_totals(const Dataset& ds, const RegionDefinition& region, Period period) {
  validate_region(region, ds);
  numeric::CompensatedSum cab;
  numeric::CompensatedSum ggb;
  for (const auto& c : region.members()) {
    for (int y = period.first_year; y <= period.last_year; ++y) {
      const auto* rec = ds.find(c, y);
      if (!rec) continue;
      if (rec->cab_eur) cab += *rec->cab_eur;
      if (rec->ggb_eur) ggb += *rec->ggb_eur;
    }
  }
  return {cab.value(), ggb.value(), psb(cab.value(), ggb.value())};
}

struct TotalsRow {
  std::string subject;
  double cab_total = 0.0;
  double ggb_total = 0.0;
  double psb_total = 0.0;
  int rank_cab = 0;
  int rank_ggb = 0;
  int rank_psb = 0;
};

/// 1-based ranks, largest signed value first; ties go to the smaller key.
inline std::vector<int> rank_descending(std::span<const double> values,
                                        std::span<const std::string> keys) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return keys[a] < keys[b];
  });
  std::vector<int> ranks(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

/// One row per country with CAB, GGB and PSB totals and their three rank
/// columns (signed, descending).
inline std::vector<TotalsRow> totals_table(const Dataset& ds, const std::vector<std::string>& countries,
                                           Period period) {
  if (period.first_year > period.last_year) {
    throw Error(errc::invalid_argument, "period ends before it starts");
  }
  std::vector<TotalsRow> rows;
  for (const auto& c : countries) {
    const auto t = region_totals(ds, RegionDefinition(c, {c}), period);
    rows.push_back({c, t.cab, t.ggb, t.psb, 0, 0, 0});
  }
  std::vector<double> cab, ggb, ps;
  for (const auto& r : rows) {
    cab.push_back(r.cab_total);
    ggb.push_back(r.ggb_total);
    ps.push_back(r.psb_total);
  }
  const auto rc = rank_descending(cab, countries);
  const auto rg = rank_descending(ggb, countries);
  const auto rp = rank_descending(ps, countries);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rank_cab = rc[i];
    rows[i].rank_ggb = rg[i];
    rows[i].rank_psb = rp[i];
  }
  return rows;
}

/// Subject GDP over universe GDP in one year.
inline double gdp_share(const Dataset& ds, const RegionDefinition& subject, int year,
                        const RegionDefinition& universe) {
  const auto total = [&](const RegionDefinition& r) {
    numeric::CompensatedSum s;
    for (const auto& c : r.members()) {
      const auto* rec = ds.find(c, year);
      if (!rec) {
        throw Error(errc::missing_gdp, "no GDP for " + c + " in " + std::to_string(year));
      }
      s += rec->gdp;
    }
    return s.value();
  };
  const double denom = total(universe);
  if (!(denom > 0.0)) throw Error(errc::missing_gdp, "universe GDP is zero in " + std::to_string(year));
  return total(subject) / denom;
}

/// Endpoint slope (last - first) / (t_last - t_first).
inline double average_rate(std::span<const SeriesPoint> points) {
  if (points.size() < 2 || points.back().t == points.front().t) {
    throw Error(errc::degenerate_span, "average rate needs two distinct times");
  }
  return (points.back().value - points.front().value) /
         static_cast<double>(points.back().t - points.front().t);
}

}  // namespace eustab
