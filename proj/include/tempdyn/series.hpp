#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tempdyn/calendar.hpp"
#include "tempdyn/csv.hpp"
#include "tempdyn/error.hpp"
#include "tempdyn/ghcn/ingest.hpp"

namespace tempdyn {

enum class Variable { Avg, Dtr };

inline const char* to_string(Variable v) { return v == Variable::Avg ? "AVG" : "DTR"; }

inline Variable parse_variable(std::string_view s) {
  if (s == "AVG" || s == "avg") return Variable::Avg;
  if (s == "DTR" || s == "dtr") return Variable::Dtr;
  throw Error("unknown variable '" + std::string(s) + "', expected AVG or DTR");
}

// Daily series over a contiguous window. avg holds exact half-degree values:
// (max + min) / 2 of two integers is representable exactly in a double.
struct TemperatureSeries {
  std::vector<Date> dates;
  std::vector<int> max_f;
  std::vector<int> min_f;
  std::vector<double> avg;
  std::vector<double> dtr;
  std::vector<int> month;  // 1..12

  std::size_t size() const { return dates.size(); }
  // 1-based time trend
  double time(std::size_t i) const { return static_cast<double>(i + 1); }

  std::span<const double> values(Variable v) const {
    return v == Variable::Avg ? std::span<const double>(avg)
                              : std::span<const double>(dtr);
  }

  std::vector<double> time_index() const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
  }

  // 1-based t of the given date; throws if outside the series.
  std::size_t time_of(const Date& d) const {
    if (dates.empty()) throw ContractViolation("empty series");
    const long off = days_between(dates.front(), d);
    if (off < 0 || off >= static_cast<long>(size())) {
      throw ContractViolation(format_date(d) + " is outside the series");
    }
    return static_cast<std::size_t>(off) + 1;
  }
};

namespace detail {

inline void append_value(TemperatureSeries& s, const Date& d, int mx, int mn) {
  s.dates.push_back(d);
  s.max_f.push_back(mx);
  s.min_f.push_back(mn);
  s.avg.push_back((mx + mn) / 2.0);
  s.dtr.push_back(static_cast<double>(mx - mn));
  s.month.push_back(static_cast<int>(month_of(d)));
}

inline std::string joined_dates(const std::vector<Date>& dates) {
  std::string s;
  for (std::size_t i = 0; i < dates.size() && i < 10; ++i) {
    if (i) s += ", ";
    s += format_date(dates[i]);
  }
  if (dates.size() > 10) s += ", ... (" + std::to_string(dates.size()) + " total)";
  return s;
}

}  // namespace detail

// Observations outside the window are ignored; every day inside it must be
// present exactly once with both values.
inline TemperatureSeries build_series(
    std::span<const ghcn::DailyObservation> observations,
    const DateRange& window) {
  const long n = window.size();
  if (n <= 0) throw ContractViolation("empty sample window");
  std::vector<const ghcn::DailyObservation*> slot(static_cast<std::size_t>(n),
                                                  nullptr);
  for (const auto& o : observations) {
    if (!window.contains(o.date)) continue;
    auto& p = slot[static_cast<std::size_t>(days_between(window.first, o.date))];
    if (p) throw DataError("duplicate observation for " + format_date(o.date));
    p = &o;
  }
  std::vector<Date> gaps, inversions;
  for (long i = 0; i < n; ++i) {
    const auto* o = slot[static_cast<std::size_t>(i)];
    if (!o || !o->tmax_f || !o->tmin_f) {
      gaps.push_back(add_days(window.first, i));
    } else if (*o->tmax_f < *o->tmin_f) {
      inversions.push_back(o->date);
    }
  }
  if (!gaps.empty()) {
    throw DataError("series is not contiguous; missing " +
                    detail::joined_dates(gaps));
  }
  if (!inversions.empty()) {
    throw DataError("MAX < MIN on " + detail::joined_dates(inversions));
  }
  TemperatureSeries s;
  for (const auto* o : slot) detail::append_value(s, o->date, *o->tmax_f, *o->tmin_f);
  return s;
}

// Monthly indicators, d(i, t) = 1 iff day t falls in month i.
class SeasonalDummies {
 public:
  explicit SeasonalDummies(std::vector<int> month_of_day)
      : month_(std::move(month_of_day)) {}

  std::size_t size() const { return month_.size(); }
  // month in 1..12, t is 0-based
  int operator()(int month, std::size_t t) const { return month_[t] == month ? 1 : 0; }
  int month_at(std::size_t t) const { return month_[t]; }

  std::vector<double> column(int month) const {
    std::vector<double> c(month_.size());
    for (std::size_t t = 0; t < c.size(); ++t) c[t] = month_[t] == month ? 1.0 : 0.0;
    return c;
  }

  std::array<std::size_t, 12> column_sums() const {
    std::array<std::size_t, 12> sums{};
    for (int m : month_) ++sums[static_cast<std::size_t>(m - 1)];
    return sums;
  }

 private:
  std::vector<int> month_;
};

inline SeasonalDummies month_dummies(const TemperatureSeries& series) {
  if (series.size() == 0) throw ContractViolation("month_dummies on an empty series");
  return SeasonalDummies(series.month);
}

inline void write_series_csv(std::ostream& out, const TemperatureSeries& s) {
  out << "date,tmax,tmin,avg,dtr,t,month\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_date(s.dates[i]) << ',' << s.max_f[i] << ',' << s.min_f[i]
        << ',' << csv::fixed(s.avg[i], 1) << ',' << s.max_f[i] - s.min_f[i]
        << ',' << i + 1 << ',' << s.month[i] << '\n';
  }
}

// Reads what write_series_csv produced and re-validates contiguity.
inline TemperatureSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty series file");
  const auto header = csv::split(line);
  if (header.size() < 3 || header[0] != "date" || header[1] != "tmax" ||
      header[2] != "tmin") {
    throw DataError("unexpected series header: " + line);
  }
  std::vector<ghcn::DailyObservation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() < 3) throw ParseError(line_no, "too few series columns");
    try {
      obs.push_back({parse_date(f[0]), std::stoi(f[1]), std::stoi(f[2])});
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed series row: " + line);
    }
  }
  if (obs.empty()) throw DataError("series file has no rows");
  return build_series(obs, {obs.front().date, obs.back().date});
}

}  // namespace tempdyn
