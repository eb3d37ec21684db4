#pragma once

// Run configuration: a flat key=value file followed by a [stations] block
// with one whitespace-separated row per station:
//
//   code  ghcn_id  include|exclude  display name...

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tempdyn/calendar.hpp"
#include "tempdyn/error.hpp"
#include "tempdyn/linreg.hpp"

namespace tempdyn {

inline constexpr const char* kDefaultArchiveEndpoint =
    "https://www.ncei.noaa.gov/pub/data/ghcn/daily/all";

struct StationEntry {
  std::string code;     // airport code
  std::string ghcn_id;  // 11-character GHCN-daily identifier
  std::string name;
  bool excluded = false;
};

struct RunConfig {
  std::vector<StationEntry> stations;
  DateRange window = default_window();
  linreg::HacBandwidth hac_bandwidth = linreg::HacBandwidth::automatic();
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir = "cache";
  bool strict_qc = false;
  std::string endpoint = kDefaultArchiveEndpoint;
  std::size_t workers = 0;

  const StationEntry& station(const std::string& code) const {
    for (const auto& s : stations) {
      if (s.code == code) return s;
    }
    throw ConfigError("station '" + code + "' is not in the configuration");
  }

  // Explicitly named stations, or every station not marked excluded.
  std::vector<StationEntry> selected(const std::vector<std::string>& codes = {}) const {
    std::vector<StationEntry> out;
    if (!codes.empty()) {
      for (const auto& c : codes) out.push_back(station(c));
      return out;
    }
    for (const auto& s : stations) {
      if (!s.excluded) out.push_back(s);
    }
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  std::set<std::string> codes;
  for (const auto& s : cfg.stations) {
    if (!codes.insert(s.code).second) {
      throw ConfigError("duplicate station code '" + s.code + "'");
    }
    if (s.ghcn_id.size() != 11) {
      throw ConfigError("station " + s.code + ": GHCN id '" + s.ghcn_id +
                        "' is not 11 characters");
    }
  }
  if (days_between(cfg.window.first, cfg.window.last) <= 0) {
    throw ConfigError("window start must precede window end");
  }
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  std::size_t line_no = 0;
  bool in_stations = false;
  std::optional<Date> start, end;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line == "[stations]") {
      in_stations = true;
      continue;
    }
    const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (in_stations) {
      std::istringstream row(line);
      StationEntry s;
      std::string status;
      if (!(row >> s.code >> s.ghcn_id >> status)) {
        throw ConfigError(where() + "station rows need: code ghcn_id include|exclude name");
      }
      if (status != "include" && status != "exclude") {
        throw ConfigError(where() + "station status must be include or exclude");
      }
      s.excluded = status == "exclude";
      std::getline(row, s.name);
      s.name = detail::trim(s.name);
      cfg.stations.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "window_start") start = parse_date(value);
      else if (key == "window_end") end = parse_date(value);
      else if (key == "hac_bandwidth") cfg.hac_bandwidth = linreg::HacBandwidth::parse(value);
      else if (key == "output_dir") cfg.output_dir = value;
      else if (key == "cache_dir") cfg.cache_dir = value;
      else if (key == "strict_qc") cfg.strict_qc = detail::parse_bool(value, line_no);
      else if (key == "endpoint") cfg.endpoint = value;
      else if (key == "workers") cfg.workers = static_cast<std::size_t>(std::stoul(value));
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(where() + "bad value for " + key + ": " + e.what());
    }
  }
  if (start) cfg.window.first = *start;
  if (end) cfg.window.last = *end;
  validate(cfg);
  return cfg;
}

// Parses the file, then applies TEMPDYN_ENDPOINT / TEMPDYN_CACHE_DIR.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  RunConfig cfg = parse_config(in);
  if (const char* v = std::getenv("TEMPDYN_ENDPOINT"); v && *v) cfg.endpoint = v;
  if (const char* v = std::getenv("TEMPDYN_CACHE_DIR"); v && *v) cfg.cache_dir = v;
  return cfg;
}

}  // namespace tempdyn
