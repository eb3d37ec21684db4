#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tempdyn/csv.hpp"
#include "tempdyn/models.hpp"
#include "tempdyn/parallel.hpp"

namespace tempdyn::report {

using models::CityReport;

struct StationInput {
  std::string code;
  std::function<TemperatureSeries()> load;
};

struct StationFailure {
  std::string code;
  std::string message;
};

struct BatchReport {
  Variable variable = Variable::Avg;
  std::vector<CityReport> rows;  // successful stations, input order
  std::vector<StationFailure> failures;
  std::optional<CityReport> median;
  std::string bandwidth;  // requested HAC setting ("auto" or lags)
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw ContractViolation("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Column-wise medians; stars are not defined for the median row.
inline CityReport median_row(const std::vector<CityReport>& rows) {
  auto col = [&](auto member) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(static_cast<double>(r.*member));
    return median_of(std::move(v));
  };
  CityReport m;
  m.station = "Median";
  m.delta_trend = col(&CityReport::delta_trend);
  m.p_nt = col(&CityReport::p_nt);
  m.p_ns = col(&CityReport::p_ns);
  m.p_nts = col(&CityReport::p_nts);
  m.rho = col(&CityReport::rho);
  m.r_squared = col(&CityReport::r_squared);
  return m;
}

// The median row is produced only when a strict majority of the requested
// stations succeeded (8 of 15 for the full station set).
inline bool median_is_defined(std::size_t succeeded, std::size_t requested) {
  return succeeded > 0 && 2 * succeeded > requested;
}

inline BatchReport batch_report(const std::vector<StationInput>& stations, Variable variable,
                                const linreg::HacBandwidth& bw = linreg::HacBandwidth::automatic(),
                                std::size_t workers = 0) {
  std::vector<std::optional<CityReport>> results(stations.size());
  std::vector<std::string> errors(stations.size());
  parallel_for(stations.size(), workers, [&](std::size_t i) {
    try {
      results[i] = models::analyze_station(stations[i].code, stations[i].load(), variable, bw);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  BatchReport out;
  out.variable = variable;
  out.bandwidth = bw.to_string();
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (results[i]) {
      out.rows.push_back(*results[i]);
    } else {
      out.failures.push_back({stations[i].code, errors[i]});
    }
  }
  if (median_is_defined(out.rows.size(), stations.size())) out.median = median_row(out.rows);
  return out;
}

inline std::vector<std::string> csv_header() {
  return {"station",       "delta_trend",     "delta_trend_star", "p_nt",
          "p_ns",          "p_nts",           "rho",              "rho_star",
          "r_squared",     "delta_trend_full", "p_nt_full",       "p_ns_full",
          "p_nts_full",    "rho_full",        "r_squared_full",   "hac_bandwidth",
          "nobs"};
}

inline std::vector<std::string> csv_fields(const CityReport& r, bool is_median) {
  auto star = [&](bool s) { return is_median ? std::string() : std::string(s ? "true" : "false"); };
  return {r.station,
          csv::fixed(r.delta_trend, 2),
          star(r.delta_trend_star),
          csv::fixed(r.p_nt, 2),
          csv::fixed(r.p_ns, 2),
          csv::fixed(r.p_nts, 2),
          csv::fixed(r.rho, 2),
          star(r.rho_star),
          csv::fixed(r.r_squared, 2),
          csv::full(r.delta_trend),
          csv::full(r.p_nt),
          csv::full(r.p_ns),
          csv::full(r.p_nts),
          csv::full(r.rho),
          csv::full(r.r_squared),
          is_median ? std::string() : std::to_string(r.hac_bandwidth),
          is_median ? std::string() : std::to_string(r.nobs)};
}

inline void write_csv(std::ostream& out, const BatchReport& report) {
  out << csv::join(csv_header()) << '\n';
  for (const auto& r : report.rows) out << csv::join(csv_fields(r, false)) << '\n';
  if (report.median) out << csv::join(csv_fields(*report.median, true)) << '\n';
}

namespace detail {

inline std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string text_row(const CityReport& r, bool is_median) {
  auto starred = [&](double v, bool s) {
    return csv::fixed(v, 2) + (!is_median && s ? "*" : " ");
  };
  std::string line = pad_right(r.station, 8);
  line += pad_left(starred(r.delta_trend, r.delta_trend_star), 12);
  line += pad_left(csv::fixed(r.p_nt, 2) + " ", 9);
  line += pad_left(csv::fixed(r.p_ns, 2) + " ", 9);
  line += pad_left(csv::fixed(r.p_nts, 2) + " ", 9);
  line += pad_left(starred(r.rho, r.rho_star), 9);
  line += pad_left(csv::fixed(r.r_squared, 2), 8);
  return line;
}

}  // namespace detail

// Aligned plain-text table; asterisks mark significance at the 1% level.
inline void write_text(std::ostream& out, const BatchReport& report) {
  out << to_string(report.variable) << " (HAC bandwidth: " << report.bandwidth << ")\n";
  std::string header = detail::pad_right("station", 8);
  header += detail::pad_left("dtrend ", 12);
  header += detail::pad_left("p(nt) ", 9);
  header += detail::pad_left("p(ns) ", 9);
  header += detail::pad_left("p(nts) ", 9);
  header += detail::pad_left("rho ", 9);
  header += detail::pad_left("R2", 8);
  const std::string rule(header.size(), '-');
  out << header << '\n' << rule << '\n';
  for (const auto& r : report.rows) out << detail::text_row(r, false) << '\n';
  if (report.median) out << rule << '\n' << detail::text_row(*report.median, true) << '\n';
  for (const auto& f : report.failures) out << "# " << f.code << " failed: " << f.message << '\n';
}

}  // namespace tempdyn::report
