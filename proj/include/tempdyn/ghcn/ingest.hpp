#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tempdyn/calendar.hpp"
#include "tempdyn/error.hpp"
#include "tempdyn/ghcn/dly.hpp"

namespace tempdyn::ghcn {

// Tenths of a degree Celsius to whole degrees Fahrenheit, rounding halves
// away from zero. Exact integer arithmetic: F = (9 * tenths + 1600) / 50.
inline int to_fahrenheit_int(int tenths_celsius) {
  if (tenths_celsius == kMissingValue) {
    throw ContractViolation("to_fahrenheit_int called on the missing sentinel");
  }
  const long num = 9L * tenths_celsius + 1600L;
  const long q = num >= 0 ? (num + 25) / 50 : -((-num + 25) / 50);
  return static_cast<int>(q);
}

inline int round_half_away(double x) { return static_cast<int>(std::lround(x)); }

// Fills isolated interior gaps with the rounded mean of both neighbours.
// Throws InterpolationError (positions are 0-based) for a gap at either end
// or for two or more consecutive missing values.
inline std::vector<int> interpolate_missing(
    std::span<const std::optional<int>> series) {
  const std::size_t n = series.size();
  if (n == 0) return {};
  std::vector<std::size_t> boundary;
  if (!series.front()) boundary.push_back(0);
  if (!series.back() && n > 1) boundary.push_back(n - 1);
  if (!boundary.empty()) {
    throw InterpolationError(InterpolationError::Kind::Boundary, boundary,
                             "missing value at the boundary of the series");
  }
  std::vector<std::size_t> runs;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!series[i] && (!series[i - 1] || !series[i + 1])) runs.push_back(i);
  }
  if (!runs.empty()) {
    throw InterpolationError(InterpolationError::Kind::ConsecutiveGap, runs,
                             "consecutive missing values cannot be "
                             "interpolated");
  }
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (series[i]) {
      out[i] = *series[i];
    } else {
      out[i] = round_half_away((*series[i - 1] + *series[i + 1]) / 2.0);
    }
  }
  return out;
}

struct DailyObservation {
  Date date;
  std::optional<int> tmax_f;
  std::optional<int> tmin_f;
};

// Lays TMAX/TMIN records onto the window, one observation per calendar day.
// Days without a record or with the sentinel stay missing. With strict_qc,
// values carrying a quality flag are treated as missing too.
inline std::vector<DailyObservation> observations_in_window(
    const std::vector<RawDlyRecord>& records, const DateRange& window,
    bool strict_qc = false) {
  const long n = window.size();
  if (n <= 0) throw ContractViolation("empty sample window");
  std::vector<DailyObservation> obs(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) obs[i].date = add_days(window.first, i);

  for (const auto& rec : records) {
    const bool is_max = rec.element == "TMAX";
    if (!is_max && rec.element != "TMIN") continue;
    const unsigned len = days_in_month(rec.year, static_cast<unsigned>(rec.month));
    for (unsigned d = 1; d <= len; ++d) {
      const DaySlot& slot = rec.values[d - 1];
      if (slot.missing() || (strict_qc && slot.failed_qc())) continue;
      const Date date = make_date(rec.year, static_cast<unsigned>(rec.month), d);
      if (!window.contains(date)) continue;
      auto& o = obs[static_cast<std::size_t>(days_between(window.first, date))];
      (is_max ? o.tmax_f : o.tmin_f) = to_fahrenheit_int(slot.value);
    }
  }
  return obs;
}

struct RepairReport {
  std::vector<DailyObservation> observations;  // complete after repair
  std::vector<Date> interpolated_tmax;
  std::vector<Date> interpolated_tmin;
  std::vector<Date> inversions;  // days with tmax < tmin after repair
};

namespace detail {

inline std::string date_list(const std::vector<DailyObservation>& obs,
                             const std::vector<std::size_t>& positions) {
  std::string s;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i == 8) {
      s += ", ... (" + std::to_string(positions.size()) + " total)";
      break;
    }
    if (i) s += ", ";
    s += format_date(obs[positions[i]].date);
  }
  return s;
}

}  // namespace detail

// Interpolates isolated single-day gaps in each element. Multi-day and
// boundary gaps raise a DataError naming the element and dates.
inline RepairReport repair_observations(std::vector<DailyObservation> obs) {
  RepairReport report;
  auto repair = [&](std::optional<int> DailyObservation::*field,
                    std::vector<Date>& filled, const char* name) {
    std::vector<std::optional<int>> values;
    values.reserve(obs.size());
    for (const auto& o : obs) values.push_back(o.*field);
    std::vector<int> repaired;
    try {
      repaired = interpolate_missing(values);
    } catch (const InterpolationError& e) {
      const char* kind = e.kind() == InterpolationError::Kind::Boundary
                             ? "missing at window boundary"
                             : "unsupported multi-day gap";
      throw DataError(std::string(name) + " " + kind + ": " +
                      detail::date_list(obs, e.positions()));
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (!(obs[i].*field)) filled.push_back(obs[i].date);
      obs[i].*field = repaired[i];
    }
  };
  repair(&DailyObservation::tmax_f, report.interpolated_tmax, "TMAX");
  repair(&DailyObservation::tmin_f, report.interpolated_tmin, "TMIN");
  for (const auto& o : obs) {
    if (*o.tmax_f < *o.tmin_f) report.inversions.push_back(o.date);
  }
  report.observations = std::move(obs);
  return report;
}

struct IngestOptions {
  DateRange window = default_window();
  bool strict_qc = false;
};

// Full ingest of one station's .dly payload.
inline RepairReport ingest_dly(std::string_view bytes,
                               const IngestOptions& options = {}) {
  const auto records = temperature_records(parse_dly(bytes));
  return repair_observations(
      observations_in_window(records, options.window, options.strict_qc));
}

}  // namespace tempdyn::ghcn
