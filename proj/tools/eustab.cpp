// eustab: reproducible balance reports, exponential fits and gap stability
// analysis over a country-year dataset.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unistd.h>

#include <CLI11.hpp>

#include "eustab/eustab.hpp"

#ifndef EUSTAB_DEFAULT_DATA_DIR
#define EUSTAB_DEFAULT_DATA_DIR "data/reference"
#endif

namespace fs = std::filesystem;
using namespace eustab;

namespace {

enum Exit { ok = 0, config_error = 2, data_error = 3, fit_error = 4, intersection_error = 5 };

struct RunConfig {
  std::string data_dir = EUSTAB_DEFAULT_DATA_DIR;
  std::string regions;
  std::string out = "out";
  std::string format = "csv";
  double level = 0.95;
  double band_level = kCalibratedBandLevel;
};

int exit_code(errc e) {
  switch (e) {
    case errc::invalid_argument:
    case errc::io:
    case errc::unknown_subject:
      return config_error;
    case errc::no_convergence:
    case errc::singular_jacobian:
      return fit_error;
    case errc::no_intersection:
    case errc::root_not_bracketed:
      return intersection_error;
    default:
      return data_error;
  }
}

struct Inputs {
  Dataset data;
  RegionCatalog regions;
};

Inputs load_inputs(const RunConfig& cfg) {
  if (!fs::is_directory(cfg.data_dir)) throw Error(errc::io, "data directory not found: " + cfg.data_dir);
  const fs::path regions = cfg.regions.empty() ? fs::path(cfg.data_dir) / "regions.json" : fs::path(cfg.regions);
  Inputs in{load_dataset(cfg.data_dir), fs::exists(regions) ? RegionCatalog::load(regions) : default_regions()};
  for (const auto& [name, region] : in.regions.all()) validate_region(region, in.data);
  return in;
}

void write_text_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << body)) throw Error(errc::io, "cannot write " + path.string());
}

class Emitter {
 public:
  explicit Emitter(const RunConfig& cfg) : dir_(cfg.out), text_(cfg.format == "text") {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (!fs::is_directory(dir_)) throw Error(errc::io, "cannot create output directory " + dir_.string());
    color_ = text_ && ::isatty(STDOUT_FILENO) && std::getenv("NO_COLOR") == nullptr;
  }

  /// stem.csv and stem.txt, echoing the selected format on stdout.
  void table(const std::string& stem, const ReportTable& t) {
    write_text_file(dir_ / (stem + ".csv"), to_csv(t));
    write_text_file(dir_ / (stem + ".txt"), to_text(t));
    std::cout << (text_ ? to_text(t, color_) : to_csv(t)) << '\n';
  }

  /// Plot data, csv only.
  void series(const std::string& stem, const ReportTable& t) {
    write_text_file(dir_ / (stem + ".csv"), to_csv(t));
    std::cout << "wrote " << (dir_ / (stem + ".csv")).string() << '\n';
  }

 private:
  fs::path dir_;
  bool text_;
  bool color_ = false;
};

const std::map<std::string, std::string> kSeries = {
    {"eu9plus", "EU9+"}, {"eu18minus", "EU18-"}, {"euro7plus", "Eurozone7+"}, {"euro10minus", "Eurozone10-"}};

struct Scope {
  std::string surplus;
  std::string deficit;
};

const std::map<std::string, Scope> kScopes = {{"eu", {"EU9+", "EU18-"}}, {"eurozone", {"Eurozone7+", "Eurozone10-"}}};

ExpFitModel fit_region(const Inputs& in, const std::string& region) {
  const auto pts = cumulative_points(in.data, in.regions.resolve(region, in.data));
  return fit_exponential(pts);
}

GapAnalysis gap_for(const Inputs& in, const Scope& scope) {
  return GapAnalysis(fit_region(in, scope.surplus), fit_region(in, scope.deficit));
}

int latest_t(const Dataset& ds) { return year_to_t(*ds.years().rbegin()); }

void cmd_report(const RunConfig& cfg, int id) {
  const auto in = load_inputs(cfg);
  const auto t = report_table(id, in.data, in.regions);
  Emitter(cfg).table(std::string("table") + (id < 10 ? "0" : "") + std::to_string(id), t);
}

void cmd_fit(const RunConfig& cfg, const std::string& series) {
  const auto in = load_inputs(cfg);
  const auto& region = kSeries.at(series);
  const auto pts = cumulative_points(in.data, in.regions.resolve(region, in.data));
  const auto model = fit_exponential(pts);
  Emitter out(cfg);
  out.table("fit_" + series + "_summary", model_summary_report(region, model, cfg.level));
  out.table("fit_" + series + "_predictions",
            prediction_report(region, prediction_table(model, pts, 0, 20, cfg.level)));
}

void cmd_stability(const RunConfig& cfg, const std::string& name) {
  const auto in = load_inputs(cfg);
  const auto& scope = kScopes.at(name);
  const auto g = gap_for(in, scope);
  const auto tp = turning_points(g);
  const auto ui = uncertainty_interval(g, cfg.band_level);
  Emitter out(cfg);
  out.table("stability_" + name, stability_report(name, g, tp, ui, latest_t(in.data)));
  out.series("plot_accumulation_" + name, accumulation_plot(g));
  out.series("plot_gap_" + name, gap_plot(g));
  out.series("plot_bands_" + name, band_plot(g, tp.level, cfg.band_level));
}

void cmd_calibrate(const RunConfig& cfg, const std::string& name, double t_m, double t_M) {
  const auto in = load_inputs(cfg);
  const auto g = gap_for(in, kScopes.at(name));
  const auto candidates = calibration_candidates(g, t_m, t_M);
  ReportTable t{"Band level implied by target interval endpoints: " + name,
                {"endpoint", "t", "equation", "band_level", "joint_level", "reproduces"},
                {}};
  for (const auto& c : candidates) {
    t.rows.push_back({c.t == t_m ? "t_m" : "t_M", format_sig(c.t), std::string(to_string(c.equation)),
                      c.band_level ? format_sig(*c.band_level) : "",
                      c.band_level ? format_sig(*c.band_level * *c.band_level) : "",
                      c.reproduces ? "yes" : "no"});
  }
  if (const auto level = consensus_band_level(candidates)) {
    t.rows.push_back({"inferred", "", "", format_sig(*level), format_sig(*level * *level), ""});
  }
  Emitter(cfg).table("calibration_" + name, t);
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--data-dir", cfg.data_dir, "Directory holding gdp, cab_pct and ggb tables")->capture_default_str();
  sub->add_option("--regions", cfg.regions, "Regions JSON (default: <data-dir>/regions.json)");
  sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  sub->add_option("--format", cfg.format, "Stdout format")
      ->check(CLI::IsMember({"csv", "text"}))
      ->capture_default_str();
  sub->add_option("--level", cfg.level, "Parameter and prediction confidence level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--band-level", cfg.band_level, "Per-band confidence for uncertainty intervals")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EU current-account balance accounting, exponential fits and stability analysis"};
  app.require_subcommand(1);
  RunConfig cfg;

  int table = 0;
  auto* report = app.add_subcommand("report", "Write one of the report tables 1-12");
  report->add_option("--table", table, "Table number")->required()->check(CLI::Range(1, kReportTableCount));
  add_common(report, cfg);

  std::string series;
  auto* fit = app.add_subcommand("fit", "Fit alpha*exp(beta*t) to a cumulative CAB series");
  fit->add_option("--series", series, "Series name")->required()->check(CLI::IsMember(
      std::vector<std::string>{"eu9plus", "eu18minus", "euro7plus", "euro10minus"}));
  add_common(fit, cfg);

  std::string scope;
  auto* stability = app.add_subcommand("stability", "Turning points and uncertainty interval of a gap function");
  stability->add_option("--scope", scope, "Analysis scope")->required()->check(CLI::IsMember({"eu", "eurozone"}));
  add_common(stability, cfg);

  double t_min = 0.0, t_max = 0.0;
  auto* calibrate = app.add_subcommand("calibrate", "Infer the band level from target interval endpoints");
  calibrate->add_option("--scope", scope, "Analysis scope")->required()->check(CLI::IsMember({"eu", "eurozone"}));
  calibrate->add_option("--t-min", t_min, "Target lower endpoint t_m")->required();
  calibrate->add_option("--t-max", t_max, "Target upper endpoint t_M")->required();
  add_common(calibrate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  try {
    if (cfg.level <= 0.0 || cfg.level >= 1.0) throw Error(errc::invalid_argument, "--level must lie in (0, 1)");
    if (cfg.band_level <= 0.0 || cfg.band_level >= 1.0) {
      throw Error(errc::invalid_argument, "--band-level must lie in (0, 1)");
    }
    if (*report) cmd_report(cfg, table);
    if (*fit) cmd_fit(cfg, series);
    if (*stability) cmd_stability(cfg, scope);
    if (*calibrate) cmd_calibrate(cfg, scope, t_min, t_max);
  } catch (const Error& e) {
    std::cerr << "eustab: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "eustab: " << e.what() << '\n';
    return config_error;
  }
  return ok;
}
