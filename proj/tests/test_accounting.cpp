#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "test_support.hpp"

using namespace eustab;
using eustab::testing::reference_data;
using eustab::testing::reference_regions;

namespace {

const RegionDefinition& region(const std::string& name) { return reference_regions().at(name); }

// Plain member-by-member sum of one balance over the whole period.
double naive_total(const RegionDefinition& r, BalanceKind kind) {
  double s = 0.0;
  for (const auto& [key, rec] : reference_data().records()) {
    if (!r.contains(rec.country)) continue;
    if (const auto v = record_value(rec, kind)) s += *v;
  }
  return s;
}

// The sum rule pairs: region, its complement, and their union.
const std::vector<std::array<const char*, 3>> kPartitions = {
    {"Eurozone", "EU10", "EU27"},          {"EU9+", "EU18-", "EU27"},
    {"Germany", "EU26", "EU27"},           {"Eurozone7+", "Eurozone10-", "Eurozone"},
    {"Germany", "Eurozone16", "Eurozone"},  {"Germany", "Eurozone6+", "Eurozone7+"},
};

RegionDefinition subject(const std::string& name) { return reference_regions().resolve(name, reference_data()); }

}  // namespace

TEST(Psb, Identity) {
  EXPECT_NEAR(psb(45.1827, -94.2458), 139.428, 5e-4);
  EXPECT_NEAR(psb(1097.96, -977.186), 2075.15, 5e-3);
  EXPECT_EQ(psb(0.0, 0.0), 0.0);
}

TEST(Psb, HoldsExactlyForEveryRecord) {
  int checked = 0;
  for (const auto& [key, rec] : reference_data().records()) {
    if (!rec.cab_eur || !rec.ggb_eur) {
      EXPECT_FALSE(rec.psb_eur.has_value());
      continue;
    }
    EXPECT_EQ(*rec.psb_eur, *rec.cab_eur - *rec.ggb_eur);
    ++checked;
  }
  EXPECT_EQ(checked, 451);
}

TEST(RegionSeries, TotalsMatchNaiveSums) {
  for (const auto& [name, r] : reference_regions().all()) {
    const auto t = region_totals(reference_data(), r, {});
    EXPECT_NEAR(t.cab, naive_total(r, BalanceKind::cab), 1e-9 * std::max(1.0, std::abs(t.cab))) << name;
    EXPECT_NEAR(t.ggb, naive_total(r, BalanceKind::ggb), 1e-9 * std::max(1.0, std::abs(t.ggb))) << name;
    EXPECT_EQ(t.psb, t.cab - t.ggb);
  }
}

TEST(RegionSeries, PublishedTotals) {
  EXPECT_EQ(format_sig(region_totals(reference_data(), region("Eurozone"), {}).cab), "563.448");
  EXPECT_EQ(format_sig(region_totals(reference_data(), region("EU27"), {}).cab), "-34.5079");
  const auto s = region_series(reference_data(), region("EU9+"), BalanceKind::cab, SeriesMode::cumulative);
  EXPECT_EQ(format_sig(s.at(1).value()), "65.0635");
}

TEST(RegionSeries, CumulativeIsRunningSumOfAnnual) {
  for (const auto& [name, r] : reference_regions().all()) {
    const auto annual = region_series(reference_data(), r, BalanceKind::cab, SeriesMode::annual);
    const auto cum = region_series(reference_data(), r, BalanceKind::cab, SeriesMode::cumulative);
    ASSERT_EQ(annual.points.size(), cum.points.size());
    EXPECT_EQ(cum.points.front().value, annual.points.front().value);
    for (std::size_t k = 1; k < cum.points.size(); ++k) {
      EXPECT_GT(cum.points[k].t, cum.points[k - 1].t);
      EXPECT_NEAR(cum.points[k].value - cum.points[k - 1].value, annual.points[k].value,
                  1e-9 * std::max(1.0, std::abs(cum.points[k].value)));
    }
  }
}

TEST(RegionSeries, SumRuleOverPartitions) {
  for (const auto& [a, b, u] : kPartitions) {
    for (const auto kind : {BalanceKind::cab, BalanceKind::ggb, BalanceKind::psb, BalanceKind::gdp}) {
      const auto sa = region_series(reference_data(), subject(a), kind, SeriesMode::annual);
      const auto sb = region_series(reference_data(), subject(b), kind, SeriesMode::annual);
      const auto su = region_series(reference_data(), subject(u), kind, SeriesMode::annual);
      for (const auto& p : su.points) {
        const double lhs = sa.at(p.t).value_or(0.0) + sb.at(p.t).value_or(0.0);
        EXPECT_NEAR(lhs, p.value, 1e-9 * std::max(1.0, std::abs(p.value))) << a << "+" << b << " t=" << p.t;
      }
      const auto ta = region_totals(reference_data(), subject(a), {});
      const auto tb = region_totals(reference_data(), subject(b), {});
      const auto tu = region_totals(reference_data(), subject(u), {});
      EXPECT_NEAR(ta.cab + tb.cab, tu.cab, 1e-9 * std::abs(tu.cab) + 1e-9);
    }
  }
}

TEST(RegionSeries, EmptyIntersection) {
  const auto ds = assemble({{"DE", 2011, 1.0}}, {}, {});
  try {
    region_series(ds, RegionDefinition("x", {"DE"}), BalanceKind::cab, SeriesMode::annual);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::empty_intersection);
  }
}

TEST(RegionSeries, UnknownMemberRejected) {
  try {
    region_series(reference_data(), RegionDefinition("x", {"DE", "ZZ"}), BalanceKind::cab, SeriesMode::annual);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::not_subset);
  }
}

TEST(TotalsTable, PublishedRanks) {
  const auto& ds = reference_data();
  std::vector<std::string> codes(ds.countries().begin(), ds.countries().end());
  const auto rows = totals_table(ds, codes, {});
  const auto find = [&](const std::string& c) {
    return *std::find_if(rows.begin(), rows.end(), [&](const TotalsRow& r) { return r.subject == c; });
  };
  const auto de = find("DE");
  EXPECT_EQ(de.rank_cab, 1);
  EXPECT_EQ(de.rank_ggb, 26);
  EXPECT_EQ(de.rank_psb, 1);
  EXPECT_EQ(find("ES").rank_cab, 27);
  const auto single = totals_table(ds, {"FR"}, {});
  EXPECT_EQ(single[0].rank_cab, 1);
  EXPECT_EQ(single[0].rank_ggb, 1);
  EXPECT_EQ(single[0].rank_psb, 1);
}

TEST(TotalsTable, RanksArePermutationsAndOrderFree) {
  const auto& ds = reference_data();
  std::vector<std::string> codes(ds.countries().begin(), ds.countries().end());
  const auto base = totals_table(ds, codes, {});
  std::map<std::string, std::array<int, 3>> ranks;
  for (const auto& r : base) ranks[r.subject] = {r.rank_cab, r.rank_ggb, r.rank_psb};
  for (int col = 0; col < 3; ++col) {
    std::vector<int> v;
    for (const auto& [c, rk] : ranks) v.push_back(rk[col]);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i) + 1);
  }
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(codes.begin(), codes.end(), rng);
    for (const auto& r : totals_table(ds, codes, {})) {
      EXPECT_EQ(ranks[r.subject], (std::array<int, 3>{r.rank_cab, r.rank_ggb, r.rank_psb}));
    }
  }
}

TEST(TotalsTable, TiesGoToSmallerKey) {
  const std::vector<double> v = {3.0, 5.0, 3.0, -1.0};
  const std::vector<std::string> k = {"b", "z", "a", "c"};
  EXPECT_EQ(rank_descending(v, k), (std::vector<int>{3, 1, 2, 4}));
}

TEST(GdpShare, PublishedCells) {
  const auto& ds = reference_data();
  const auto& eu = region("EU27");
  EXPECT_EQ(format_sig(gdp_share(ds, RegionDefinition("DE", {"DE"}), 1995, eu)), "0.27416");
  EXPECT_EQ(format_sig(gdp_share(ds, region("EU9+"), 2011, eu)), "0.531669");
  const double ez = gdp_share(ds, region("Eurozone"), 1995, eu);
  const double rest = gdp_share(ds, region("EU10"), 1995, eu);
  EXPECT_EQ(format_sig(ez), "0.792378");
  EXPECT_EQ(format_sig(rest), "0.207622");
  EXPECT_NEAR(ez + rest, 1.0, 1e-12);
}

TEST(GdpShare, MissingYear) {
  try {
    gdp_share(reference_data(), region("EU9+"), 1980, region("EU27"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::missing_gdp);
  }
}

TEST(AverageRate, PublishedRates) {
  const auto& ds = reference_data();
  const auto eu9 = gdp_ratio_series(ds, region("EU9+"));
  EXPECT_NEAR(average_rate(eu9.points), 0.001544, 5e-7);
  const auto de = gdp_ratio_series(ds, subject("Germany"));
  EXPECT_NEAR(average_rate(de.points), 0.0043125, 5e-8);
  const std::vector<SeriesPoint> flat = {{0, 0.2}, {4, 0.2}, {9, 0.2}};
  EXPECT_EQ(average_rate(flat), 0.0);
}

// The published Eurozone7+ rate (0.1304% a year) is not the endpoint slope of
// its own ratio column (0.1386%); the endpoint method is kept.
TEST(AverageRate, Eurozone7PlusKnownDeviation) {
  const auto s = gdp_ratio_series(reference_data(), region("Eurozone7+"));
  const double rate = average_rate(s.points);
  EXPECT_NEAR(rate, 0.0013864, 5e-7);
  EXPECT_GT(std::abs(rate - 0.001304), 5e-5);
}

TEST(AverageRate, DegenerateSpan) {
  const std::vector<SeriesPoint> one = {{3, 0.1}};
  EXPECT_THROW(average_rate(one), Error);
}

TEST(Complement, Pairs) {
  const auto& eu = region("EU27");
  const auto eu18 = complement(region("EU9+"), eu, "EU18-");
  EXPECT_EQ(eu18.size(), 18u);
  EXPECT_EQ(eu18, region("EU18-"));
  const auto eu26 = complement(RegionDefinition("Germany", {"DE"}), eu, "EU26");
  EXPECT_EQ(eu26.size(), 26u);
  EXPECT_FALSE(eu26.contains("DE"));
  try {
    complement(eu, eu, "none");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::empty_region);
  }
  try {
    complement(eu, region("Eurozone"), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::not_subset);
  }
}

TEST(Regions, BundledFileMatchesDefaults) {
  const auto defaults = default_regions();
  ASSERT_EQ(defaults.all().size(), reference_regions().all().size());
  for (const auto& [name, r] : defaults.all()) EXPECT_EQ(r, reference_regions().at(name)) << name;
  const auto again = RegionCatalog::from_json(defaults.to_json());
  for (const auto& [name, r] : defaults.all()) EXPECT_EQ(r, again.at(name));
}
