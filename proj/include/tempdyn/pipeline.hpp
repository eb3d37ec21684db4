#pragma once

// The ingest / tables / figures / fit commands. Every data file written here
// is a pure function of the inputs; only manifest.json carries a timestamp.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tempdyn/config.hpp"
#include "tempdyn/density.hpp"
#include "tempdyn/ghcn/fetch.hpp"
#include "tempdyn/ghcn/ingest.hpp"
#include "tempdyn/report.hpp"

namespace tempdyn::pipeline {

namespace fs = std::filesystem;

inline fs::path series_path(const RunConfig& cfg, const std::string& code) {
  return cfg.output_dir / "series" / (code + ".csv");
}

inline void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".write_probe";
  std::ofstream out(probe);
  if (ec || !out) throw ConfigError("output directory " + dir.string() + " is not writable");
  out.close();
  fs::remove(probe, ec);
}

inline void write_text_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

inline TemperatureSeries load_series(const RunConfig& cfg, const std::string& code) {
  const auto path = series_path(cfg, code);
  std::ifstream in(path);
  if (!in) {
    throw Error("no series for " + code + " at " + path.string() +
                "; run `tempdyn ingest` first");
  }
  return read_series_csv(in);
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
  std::vector<std::string> stations;  // empty: all included stations
  bool offline = false;
  bool refresh = false;
};

struct StationIngest {
  StationEntry station;
  bool ok = false;
  bool from_cache = false;
  std::size_t rows = 0;
  std::vector<Date> interpolated_tmax;
  std::vector<Date> interpolated_tmin;
  std::vector<std::string> warnings;
  std::string error;
};

struct IngestSummary {
  std::vector<StationIngest> stations;
  bool ok() const {
    for (const auto& s : stations) {
      if (!s.ok) return false;
    }
    return true;
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json date_array(const std::vector<Date>& dates) {
  auto arr = nlohmann::json::array();
  for (const auto& d : dates) arr.push_back(format_date(d));
  return arr;
}

inline IngestSummary cmd_ingest(const RunConfig& cfg, const IngestOptions& opts = {}) {
  const auto selected = cfg.selected(opts.stations);
  ensure_writable(cfg.output_dir);
  IngestSummary summary;
  summary.stations.resize(selected.size());
  parallel_for(selected.size(), cfg.workers, [&](std::size_t i) {
    StationIngest& r = summary.stations[i];
    r.station = selected[i];
    try {
      const auto payload = ghcn::fetch_station(r.station.ghcn_id, cfg.endpoint, cfg.cache_dir,
                                               {opts.offline, opts.refresh});
      r.from_cache = payload.from_cache;
      r.warnings = payload.warnings;
      const auto repaired = ghcn::ingest_dly(payload.bytes, {cfg.window, cfg.strict_qc});
      r.interpolated_tmax = repaired.interpolated_tmax;
      r.interpolated_tmin = repaired.interpolated_tmin;
      const auto series = build_series(repaired.observations, cfg.window);
      std::ostringstream csv;
      write_series_csv(csv, series);
      write_text_file(series_path(cfg, r.station.code), csv.str());
      r.rows = series.size();
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  nlohmann::json manifest;
  manifest["generated_at"] = utc_timestamp();
  manifest["window"] = {{"start", format_date(cfg.window.first)},
                        {"end", format_date(cfg.window.last)}};
  manifest["strict_qc"] = cfg.strict_qc;
  manifest["endpoint"] = cfg.endpoint;
  auto stations = nlohmann::json::array();
  for (const auto& r : summary.stations) {
    nlohmann::json s;
    s["code"] = r.station.code;
    s["ghcn_id"] = r.station.ghcn_id;
    s["name"] = r.station.name;
    s["status"] = r.ok ? "ok" : "failed";
    s["rows"] = r.rows;
    s["from_cache"] = r.from_cache;
    s["interpolated"] = {{"tmax", date_array(r.interpolated_tmax)},
                         {"tmin", date_array(r.interpolated_tmin)}};
    if (!r.warnings.empty()) s["warnings"] = r.warnings;
    if (!r.ok) s["error"] = r.error;
    stations.push_back(std::move(s));
  }
  manifest["stations"] = std::move(stations);
  write_text_file(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------- tables

struct TablesOptions {
  std::vector<Variable> variables{Variable::Avg, Variable::Dtr};
  std::vector<std::string> stations;
};

struct TablesSummary {
  std::vector<report::BatchReport> reports;
  bool ok() const {
    for (const auto& r : reports) {
      if (!r.failures.empty()) return false;
    }
    return true;
  }
};

inline std::string table_stem(Variable v) {
  return v == Variable::Avg ? "table_avg" : "table_dtr";
}

inline TablesSummary cmd_tables(const RunConfig& cfg, const TablesOptions& opts = {}) {
  const auto selected = cfg.selected(opts.stations);
  ensure_writable(cfg.output_dir);
  std::vector<report::StationInput> inputs;
  for (const auto& s : selected) {
    inputs.push_back({s.code, [&cfg, code = s.code] { return load_series(cfg, code); }});
  }
  TablesSummary summary;
  for (Variable v : opts.variables) {
    auto rep = report::batch_report(inputs, v, cfg.hac_bandwidth, cfg.workers);
    std::ostringstream csv, text;
    report::write_csv(csv, rep);
    report::write_text(text, rep);
    const auto dir = cfg.output_dir / "tables";
    write_text_file(dir / (table_stem(v) + ".csv"), csv.str());
    write_text_file(dir / (table_stem(v) + ".txt"), text.str());
    summary.reports.push_back(std::move(rep));
  }
  return summary;
}

// ---------------------------------------------------------------- figures

struct VariableFigures {
  density::DensityEstimate density;
  std::vector<density::Mode> modes;
  models::TrendResult trend;
  models::SeasonalPattern fixed_pattern;
  double fixed_r_squared = 0.0;
  models::SeasonalPattern first_year_pattern;
  models::SeasonalPattern last_year_pattern;
};

struct FigureBundle {
  std::string station;
  int first_year = 0;
  int last_year = 0;
  VariableFigures avg;
  VariableFigures dtr;
};

// t of July 1 in `year`, clamped to the series.
inline double anchor_time(const TemperatureSeries& s, int year) {
  const long off = days_between(s.dates.front(), make_date(year, 7, 1));
  const long clamped = std::clamp(off, 0L, static_cast<long>(s.size()) - 1);
  return static_cast<double>(clamped + 1);
}

inline VariableFigures compute_figures(const TemperatureSeries& s, Variable v,
                                       const linreg::HacBandwidth& bw, int first_year,
                                       int last_year) {
  VariableFigures f{};
  f.density = density::kde(s.values(v));
  f.modes = density::find_modes(f.density);
  f.trend = models::fit_trend(s, v, bw);
  const auto detrended = models::detrend(s, v, f.trend);
  const auto dummies = month_dummies(s);
  const auto fixed = models::fit_fixed_seasonal(detrended, dummies, bw);
  f.fixed_pattern = fixed.pattern;
  f.fixed_r_squared = fixed.fit.r_squared;
  const auto time = s.time_index();
  const auto evolving = models::fit_evolving_seasonal(detrended, dummies, time, bw);
  f.first_year_pattern = evolving.pattern_at(anchor_time(s, first_year));
  f.last_year_pattern = evolving.pattern_at(anchor_time(s, last_year));
  return f;
}

inline FigureBundle cmd_figures(const RunConfig& cfg, const std::string& code) {
  cfg.station(code);
  const auto s = load_series(cfg, code);
  FigureBundle b;
  b.station = code;
  b.first_year = year_of(s.dates.front());
  b.last_year = year_of(s.dates.back());
  b.avg = compute_figures(s, Variable::Avg, cfg.hac_bandwidth, b.first_year, b.last_year);
  b.dtr = compute_figures(s, Variable::Dtr, cfg.hac_bandwidth, b.first_year, b.last_year);

  const auto dir = cfg.output_dir / "figures" / code;
  std::ostringstream modes;
  modes << "variable,location,height\n";
  for (Variable v : {Variable::Avg, Variable::Dtr}) {
    const VariableFigures& f = v == Variable::Avg ? b.avg : b.dtr;
    const std::string suffix = v == Variable::Avg ? "avg" : "dtr";

    std::ostringstream dens;
    dens << "grid,value\n";
    for (std::size_t i = 0; i < f.density.grid.size(); ++i) {
      dens << csv::full(f.density.grid[i]) << ',' << csv::full(f.density.values[i]) << '\n';
    }
    write_text_file(dir / ("density_" + suffix + ".csv"), dens.str());
    for (const auto& m : f.modes) {
      modes << to_string(v) << ',' << csv::full(m.location) << ',' << csv::full(m.height) << '\n';
    }

    const auto values = s.values(v);
    const auto& fit = f.trend.fit;
    std::ostringstream trend, seasonal;
    trend << "date,t,raw,fitted\n";
    seasonal << "date,t,detrended,fixed_seasonal\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string date = format_date(s.dates[i]);
      const auto ii = static_cast<Eigen::Index>(i);
      trend << date << ',' << i + 1 << ',' << csv::full(values[i]) << ','
            << csv::full(fit.fitted(ii)) << '\n';
      seasonal << date << ',' << i + 1 << ',' << csv::full(fit.residuals(ii)) << ','
               << csv::full(f.fixed_pattern.month_effects[s.month[i] - 1]) << '\n';
    }
    write_text_file(dir / ("trend_" + suffix + ".csv"), trend.str());
    write_text_file(dir / ("seasonal_" + suffix + ".csv"), seasonal.str());

    std::ostringstream evolving;
    evolving << "month," << b.first_year << ',' << b.last_year << '\n';
    for (int m = 0; m < 12; ++m) {
      evolving << m + 1 << ',' << csv::full(f.first_year_pattern.month_effects[m]) << ','
               << csv::full(f.last_year_pattern.month_effects[m]) << '\n';
    }
    write_text_file(dir / ("evolving_pattern_" + suffix + ".csv"), evolving.str());
  }
  write_text_file(dir / "modes.csv", modes.str());

  std::ostringstream fixed;
  fixed << "month,avg,dtr\n";
  for (int m = 0; m < 12; ++m) {
    fixed << m + 1 << ',' << csv::full(b.avg.fixed_pattern.month_effects[m]) << ','
          << csv::full(b.dtr.fixed_pattern.month_effects[m]) << '\n';
  }
  write_text_file(dir / "fixed_pattern.csv", fixed.str());
  return b;
}

// ---------------------------------------------------------------- fit

inline bool is_time_slope(const std::string& name) {
  return name == "TIME" || name.ends_with("*TIME");
}

// Coefficient table for one model, as CSV preceded by '#' summary lines.
// Slopes on TIME also appear rescaled to degrees per decade.
inline linreg::ModelFit cmd_fit(const RunConfig& cfg, const std::string& code, Variable v,
                                models::ModelKind kind, std::ostream& out) {
  cfg.station(code);
  const auto s = load_series(cfg, code);
  linreg::ModelFit fit;
  switch (kind) {
    case models::ModelKind::Trend:
      fit = models::fit_trend(s, v, cfg.hac_bandwidth).fit;
      break;
    case models::ModelKind::FixedSeasonal:
    case models::ModelKind::EvolvingSeasonal: {
      const auto trend = models::fit_trend(s, v, cfg.hac_bandwidth);
      const auto detrended = models::detrend(s, v, trend);
      const auto dummies = month_dummies(s);
      if (kind == models::ModelKind::FixedSeasonal) {
        fit = models::fit_fixed_seasonal(detrended, dummies, cfg.hac_bandwidth).fit;
      } else {
        const auto time = s.time_index();
        fit = models::fit_evolving_seasonal(detrended, dummies, time, cfg.hac_bandwidth).fit;
      }
      break;
    }
    case models::ModelKind::Joint:
      fit = models::fit_joint(s, v, cfg.hac_bandwidth).fit;
      break;
  }
  out << "# station=" << code << " variable=" << to_string(v)
      << " model=" << models::to_string(kind) << '\n';
  out << "# nobs=" << fit.nobs << " r_squared=" << csv::full(fit.r_squared)
      << " r_squared_centered=" << (fit.centered ? "true" : "false")
      << " hac_bandwidth=" << *fit.bandwidth << '\n';
  out << "name,estimate,hac_se,z,p_value,per_decade_estimate,per_decade_se\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const auto& name = fit.names[i];
    const auto ii = static_cast<Eigen::Index>(i);
    const double b = fit.beta(ii);
    const double se = std::sqrt((*fit.hac_cov)(ii, ii));
    const double p = models::coefficient_p_value(fit, name);
    out << csv::field(name) << ',' << csv::full(b) << ',' << csv::full(se) << ','
        << csv::full(b / se) << ',' << csv::full(p) << ',';
    if (is_time_slope(name)) {
      out << csv::full(b * models::kDaysPerDecade) << ','
          << csv::full(se * models::kDaysPerDecade);
    } else {
      out << ',';
    }
    out << '\n';
  }
  return fit;
}

}  // namespace tempdyn::pipeline
