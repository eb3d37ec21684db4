#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "tempdyn/error.hpp"

namespace tempdyn {

using Date = std::chrono::year_month_day;

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline int year_of(const Date& d) { return static_cast<int>(d.year()); }
inline unsigned month_of(const Date& d) { return static_cast<unsigned>(d.month()); }
inline unsigned day_of(const Date& d) { return static_cast<unsigned>(d.day()); }

inline Date add_days(const Date& d, long n) {
  return Date{std::chrono::sys_days{d} + std::chrono::days{n}};
}

inline long days_between(const Date& from, const Date& to) {
  return (std::chrono::sys_days{to} - std::chrono::sys_days{from}).count();
}

inline unsigned days_in_month(int year, unsigned month) {
  using namespace std::chrono;
  return static_cast<unsigned>(
      year_month_day_last{std::chrono::year{year},
                          month_day_last{std::chrono::month{month}}}
          .day());
}

// YYYY-MM-DD
inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year_of(d), month_of(d),
                day_of(d));
  return buf;
}

inline Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  const std::string s(text);
  char tail = 0;
  if (s.size() != 10 ||
      std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw Error("invalid date '" + s + "', expected YYYY-MM-DD");
  }
  const Date date = make_date(y, m, d);
  if (!date.ok()) throw Error("invalid calendar date '" + s + "'");
  return date;
}

// Closed interval of calendar days.
struct DateRange {
  Date first;
  Date last;

  long size() const { return days_between(first, last) + 1; }
  bool contains(const Date& d) const {
    return std::chrono::sys_days{d} >= std::chrono::sys_days{first} &&
           std::chrono::sys_days{d} <= std::chrono::sys_days{last};
  }
};

inline DateRange default_window() {
  return {make_date(1960, 1, 1), make_date(2017, 12, 31)};
}

}  // namespace tempdyn
