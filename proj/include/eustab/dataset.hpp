#pragma once

// Country-year national-account records: ingestion of Eurostat bulk TSV and
// plain `country,year,value` CSV, and assembly into a validated Dataset.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eustab/error.hpp"

namespace eustab {

/// Calendar year corresponding to t = 0.
inline constexpr int kBaseYear = 1995;

constexpr int year_to_t(int year) noexcept { return year - kBaseYear; }
constexpr int t_to_year(int t) noexcept { return kBaseYear + t; }

enum class TableFormat { eurostat_tsv, plain_csv };
enum class ValueRole { gdp, cab_pct, ggb };

struct Observation {
  std::string country;
  int year = 0;
  double value = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// One country's balances for one year. Money in billion EUR; cab_pct is a
/// fraction of GDP (0.057, not 5.7). Absent values stay absent.
struct CountryYearRecord {
  std::string country;
  int year = 0;
  int t = 0;
  double gdp = 0.0;
  std::optional<double> cab_pct;
  std::optional<double> cab_eur;
  std::optional<double> ggb_eur;
  std::optional<double> psb_eur;
};

// ---------------------------------------------------------------------------
// Low-level text handling

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

inline bool is_flag_text(std::string_view s) noexcept {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

inline std::optional<int> parse_int(std::string_view s) noexcept {
  s = trim(s);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses one data cell. ":" (optionally followed by flag letters) and the
/// empty cell mean "missing"; a trailing Eurostat flag after a number is
/// dropped. Decimal point only, scientific notation accepted.
inline std::optional<double> parse_cell(std::string_view cell) {
  cell = detail::trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == ':') {
    if (detail::is_flag_text(cell.substr(1))) return std::nullopt;
    throw Error(errc::bad_numeric, "unparseable cell '" + std::string(cell) + "'");
  }
  const char* first = cell.data();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
  if (ec != std::errc{} || !std::isfinite(value) ||
      !detail::is_flag_text(std::string_view(ptr, cell.data() + cell.size() - ptr))) {
    throw Error(errc::bad_numeric, "unparseable cell '" + std::string(cell) + "'");
  }
  return value;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_roundtrip(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

/// A generic comma-separated table: header plus string cells. Every CSV the
/// tools emit reads back through this.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(std::string_view text) {
  const auto ls = detail::lines(text);
  if (ls.empty()) throw Error(errc::malformed_header, "empty csv");
  CsvTable table;
  for (auto cell : detail::split(ls.front(), ',')) table.header.emplace_back(detail::trim(cell));
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto cells = detail::split(ls[i], ',');
    if (cells.size() != table.header.size()) {
      throw Error(errc::bad_numeric, "csv line " + std::to_string(i + 1) + " has " +
                                         std::to_string(cells.size()) + " cells, expected " +
                                         std::to_string(table.header.size()));
    }
    auto& row = table.rows.emplace_back();
    for (auto cell : cells) row.emplace_back(detail::trim(cell));
  }
  return table;
}

namespace detail {

// Scale implied by a Eurostat unit code in the dimension key.
inline double unit_scale(const std::vector<std::string_view>& key) {
  for (auto part : key) {
    part = trim(part);
    if (part == "PC_GDP") return 0.01;
    if (part == "MIO_EUR") return 1e-3;
  }
  return 1.0;
}

inline void push_unique(std::vector<Observation>& out, std::set<std::pair<std::string, int>>& seen,
                        Observation obs) {
  if (!seen.emplace(obs.country, obs.year).second) {
    throw Error(errc::duplicate_key,
                "duplicate record for " + obs.country + " " + std::to_string(obs.year));
  }
  out.push_back(std::move(obs));
}

inline std::vector<Observation> parse_eurostat_tsv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty()) throw Error(errc::malformed_header, "empty input");
  const auto header = split(ls.front(), '\t');
  if (header.size() < 2) throw Error(errc::malformed_header, "no year columns");
  std::vector<int> years;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto year = parse_int(header[i]);
    if (!year) {
      throw Error(errc::malformed_header, "year label '" + std::string(trim(header[i])) + "'");
    }
    years.push_back(*year);
  }
  std::vector<Observation> out;
  std::set<std::pair<std::string, int>> seen;
  for (std::size_t li = 1; li < ls.size(); ++li) {
    const auto cells = split(ls[li], '\t');
    if (cells.size() != header.size()) {
      throw Error(errc::bad_numeric, "row " + std::to_string(li + 1) + " has wrong cell count");
    }
    const auto key = split(cells.front(), ',');
    const std::string country(trim(key.back()));
    const double scale = unit_scale(key);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (const auto v = parse_cell(cells[i])) {
        push_unique(out, seen, {country, years[i - 1], *v * scale});
      }
    }
  }
  return out;
}

inline std::vector<Observation> parse_plain_csv(std::string_view text) {
  const auto table = read_csv(text);
  if (table.header != std::vector<std::string>{"country", "year", "value"}) {
    throw Error(errc::malformed_header, "expected header country,year,value");
  }
  std::vector<Observation> out;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& row : table.rows) {
    const auto year = parse_int(row[1]);
    if (!year) throw Error(errc::bad_numeric, "year '" + row[1] + "'");
    if (const auto v = parse_cell(row[2])) push_unique(out, seen, {row[0], *year, *v});
  }
  return out;
}

}  // namespace detail

/// Parses a table of one quantity into (country, year, value) triples; missing
/// cells produce nothing. In the Eurostat dialect, a PC_GDP unit code in the
/// row key turns percentages into fractions and MIO_EUR turns millions into
/// billions; keys without a unit code are taken at face value.
inline std::vector<Observation> parse_table(std::string_view raw_text, TableFormat format,
                                            ValueRole role) {
  auto out = format == TableFormat::eurostat_tsv ? detail::parse_eurostat_tsv(raw_text)
                                                 : detail::parse_plain_csv(raw_text);
  if (role == ValueRole::gdp) {
    for (const auto& o : out) {
      if (o.value < 0.0) {
        throw Error(errc::invalid_record, "negative GDP for " + o.country + " " +
                                              std::to_string(o.year));
      }
    }
  }
  return out;
}

inline std::string write_plain_csv(const std::vector<Observation>& observations) {
  std::string out = "country,year,value\n";
  for (const auto& o : observations) {
    out += o.country;
    out += ',';
    out += std::to_string(o.year);
    out += ',';
    out += format_roundtrip(o.value);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Immutable collection of country-year records, at most one per key.
class Dataset {
 public:
  using Key = std::pair<std::string, int>;

  Dataset() = default;
  Dataset(std::map<Key, CountryYearRecord> records, std::vector<std::string> provenance)
      : records_(std::move(records)), provenance_(std::move(provenance)) {
    for (const auto& [key, rec] : records_) {
      countries_.insert(key.first);
      years_.insert(key.second);
    }
  }

  [[nodiscard]] const CountryYearRecord* find(std::string_view country, int year) const {
    const auto it = records_.find(Key(std::string(country), year));
    return it == records_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] const std::map<Key, CountryYearRecord>& records() const noexcept { return records_; }
  [[nodiscard]] const std::set<std::string>& countries() const noexcept { return countries_; }
  [[nodiscard]] const std::set<int>& years() const noexcept { return years_; }
  [[nodiscard]] const std::vector<std::string>& provenance() const noexcept { return provenance_; }
  [[nodiscard]] bool has_country(std::string_view c) const {
    return countries_.count(std::string(c)) != 0;
  }

  /// The stored input quantity for `role`, back in observation form.
  [[nodiscard]] std::vector<Observation> observations(ValueRole role) const {
    std::vector<Observation> out;
    for (const auto& [key, rec] : records_) {
      std::optional<double> v;
      switch (role) {
        case ValueRole::gdp: v = rec.gdp; break;
        case ValueRole::cab_pct: v = rec.cab_pct; break;
        case ValueRole::ggb: v = rec.ggb_eur; break;
      }
      if (v) out.push_back({rec.country, rec.year, *v});
    }
    return out;
  }

 private:
  std::map<Key, CountryYearRecord> records_;
  std::set<std::string> countries_;
  std::set<int> years_;
  std::vector<std::string> provenance_;
};

/// Joins GDP, CAB (% of GDP) and GGB triples. cab_eur = cab_pct * gdp and
/// psb_eur = cab_eur - ggb_eur wherever the inputs exist.
inline Dataset assemble(const std::vector<Observation>& gdp, const std::vector<Observation>& cab_pct,
                        const std::vector<Observation>& ggb,
                        std::vector<std::string> provenance = {}) {
  std::map<Dataset::Key, CountryYearRecord> records;
  for (const auto& o : gdp) {
    CountryYearRecord rec;
    rec.country = o.country;
    rec.year = o.year;
    rec.t = year_to_t(o.year);
    rec.gdp = o.value;
    if (!records.emplace(Dataset::Key(o.country, o.year), std::move(rec)).second) {
      throw Error(errc::duplicate_key, "duplicate GDP for " + o.country + " " + std::to_string(o.year));
    }
  }
  const auto locate = [&](const Observation& o, const char* what) -> CountryYearRecord& {
    const auto it = records.find(Dataset::Key(o.country, o.year));
    if (it == records.end()) {
      throw Error(errc::missing_gdp, std::string(what) + " present without GDP for " + o.country +
                                         " " + std::to_string(o.year));
    }
    return it->second;
  };
  for (const auto& o : cab_pct) {
    auto& rec = locate(o, "CAB");
    if (rec.cab_pct) throw Error(errc::duplicate_key, "duplicate CAB for " + o.country);
    rec.cab_pct = o.value;
    rec.cab_eur = o.value * rec.gdp;
  }
  for (const auto& o : ggb) {
    auto& rec = locate(o, "GGB");
    if (rec.ggb_eur) throw Error(errc::duplicate_key, "duplicate GGB for " + o.country);
    rec.ggb_eur = o.value;
  }
  for (auto& [key, rec] : records) {
    if (rec.cab_eur && rec.ggb_eur) rec.psb_eur = *rec.cab_eur - *rec.ggb_eur;
  }
  return Dataset(std::move(records), std::move(provenance));
}

// ---------------------------------------------------------------------------
// File loading

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `.tsv` files are read in the Eurostat dialect, anything else as plain-csv.
inline std::vector<Observation> load_table_file(const std::filesystem::path& path, ValueRole role) {
  const auto format =
      path.extension() == ".tsv" ? TableFormat::eurostat_tsv : TableFormat::plain_csv;
  return parse_table(read_file(path), format, role);
}

/// Loads gdp, cab_pct and ggb tables (`.csv` or `.tsv`) from a directory.
inline Dataset load_dataset(const std::filesystem::path& dir) {
  const auto pick = [&](const std::string& stem) {
    for (const char* ext : {".csv", ".tsv"}) {
      auto p = dir / (stem + ext);
      if (std::filesystem::exists(p)) return p;
    }
    throw Error(errc::io, "no " + stem + ".csv or " + stem + ".tsv in " + dir.string());
  };
  const auto gdp_path = pick("gdp");
  const auto cab_path = pick("cab_pct");
  const auto ggb_path = pick("ggb");
  return assemble(load_table_file(gdp_path, ValueRole::gdp),
                  load_table_file(cab_path, ValueRole::cab_pct),
                  load_table_file(ggb_path, ValueRole::ggb),
                  {gdp_path.string(), cab_path.string(), ggb_path.string()});
}

/// English short names for the EU-27 codes, as used in report rows.
inline std::string country_display_name(std::string_view code) {
  static const std::map<std::string, std::string, std::less<>> names = {
      {"AT", "Austria"},   {"BE", "Belgium"},     {"BG", "Bulgaria"},   {"CY", "Cyprus"},
      {"CZ", "CzechRep"},  {"DE", "Germany"},     {"DK", "Denmark"},    {"EE", "Estonia"},
      {"EL", "Greece"},    {"ES", "Spain"},       {"FI", "Finland"},    {"FR", "France"},
      {"HU", "Hungary"},   {"IE", "Ireland"},     {"IT", "Italy"},      {"LT", "Lithuania"},
      {"LU", "Luxembourg"}, {"LV", "Latvia"},     {"MT", "Malta"},      {"NL", "Netherlands"},
      {"PL", "Poland"},    {"PT", "Portugal"},    {"RO", "Romania"},    {"SE", "Sweden"},
      {"SI", "Slovenia"},  {"SK", "Slovakia"},    {"UK", "UK"},
  };
  const auto it = names.find(code);
  return it == names.end() ? std::string(code) : it->second;
}

}  // namespace eustab
