#pragma once

// GHCN-daily ".dly" fixed-width records.
//
// Layout of one 269-character line (1-based columns):
//
//   1-11   station identifier
//   12-15  year
//   16-17  month
//   18-21  element code (TMAX, TMIN, PRCP, ...)
//   22-269 31 day groups of 8 characters each:
//            value (5, right aligned, -9999 = missing), mflag, qflag, sflag

#include <array>
#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "tempdyn/calendar.hpp"
#include "tempdyn/error.hpp"

namespace tempdyn::ghcn {

inline constexpr int kMissingValue = -9999;
inline constexpr std::size_t kDlyLineLength = 269;
inline constexpr std::size_t kDaySlots = 31;

struct DaySlot {
  int value = kMissingValue;  // tenths of a degree Celsius for TMAX/TMIN
  char mflag = ' ';
  char qflag = ' ';
  char sflag = ' ';

  bool missing() const { return value == kMissingValue; }
  bool failed_qc() const { return qflag != ' '; }
  friend bool operator==(const DaySlot&, const DaySlot&) = default;
};

struct RawDlyRecord {
  std::string station_id;  // 11 characters, kept verbatim
  int year = 0;
  int month = 0;
  std::string element;  // 4 characters, kept verbatim
  std::array<DaySlot, kDaySlots> values{};

  bool is_temperature() const { return element == "TMAX" || element == "TMIN"; }
  friend bool operator==(const RawDlyRecord&, const RawDlyRecord&) = default;
};

namespace detail {

inline int parse_int_field(std::string_view field, std::size_t line_no,
                           const char* what) {
  std::size_t start = field.find_first_not_of(' ');
  if (start == std::string_view::npos) {
    throw ParseError(line_no, std::string("empty ") + what + " field");
  }
  field.remove_prefix(start);
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line_no, std::string("non-numeric ") + what + " field '" +
                                  std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

// Parses one line (without its terminator). `line_no` is 1-based and only
// used for diagnostics.
inline RawDlyRecord parse_dly_line(std::string_view line, std::size_t line_no) {
  if (line.size() != kDlyLineLength) {
    throw ParseError(line_no, "expected " + std::to_string(kDlyLineLength) +
                                  " characters, got " +
                                  std::to_string(line.size()));
  }
  RawDlyRecord rec;
  rec.station_id = std::string(line.substr(0, 11));
  rec.year = detail::parse_int_field(line.substr(11, 4), line_no, "year");
  rec.month = detail::parse_int_field(line.substr(15, 2), line_no, "month");
  if (rec.month < 1 || rec.month > 12) {
    throw ParseError(line_no,
                     "month out of range: " + std::to_string(rec.month));
  }
  rec.element = std::string(line.substr(17, 4));
  const unsigned month_len =
      days_in_month(rec.year, static_cast<unsigned>(rec.month));
  for (std::size_t d = 0; d < kDaySlots; ++d) {
    const std::string_view group = line.substr(21 + 8 * d, 8);
    DaySlot& slot = rec.values[d];
    slot.value = detail::parse_int_field(group.substr(0, 5), line_no, "value");
    slot.mflag = group[5];
    slot.qflag = group[6];
    slot.sflag = group[7];
    if (d >= month_len && !slot.missing()) {
      throw ParseError(line_no, "day " + std::to_string(d + 1) +
                                    " is past the end of the month but not "
                                    "missing");
    }
  }
  return rec;
}

// One record per non-empty line; LF or CRLF terminators.
inline std::vector<RawDlyRecord> parse_dly(std::string_view bytes) {
  std::vector<RawDlyRecord> out;
  std::size_t line_no = 0;
  while (!bytes.empty()) {
    ++line_no;
    const std::size_t nl = bytes.find('\n');
    std::string_view line = bytes.substr(0, nl);
    bytes.remove_prefix(nl == std::string_view::npos ? bytes.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    out.push_back(parse_dly_line(line, line_no));
  }
  return out;
}

// Inverse of parse_dly_line for records that came from canonical lines.
inline std::string format_dly_line(const RawDlyRecord& rec) {
  if (rec.station_id.size() != 11 || rec.element.size() != 4) {
    throw ContractViolation("station id must be 11 and element 4 characters");
  }
  std::string line;
  line.reserve(kDlyLineLength);
  line += rec.station_id;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02d", rec.year, rec.month);
  line += buf;
  line += rec.element;
  for (const DaySlot& slot : rec.values) {
    std::snprintf(buf, sizeof buf, "%5d", slot.value);
    line += buf;
    line += slot.mflag;
    line += slot.qflag;
    line += slot.sflag;
  }
  if (line.size() != kDlyLineLength) {
    throw ContractViolation("field overflow while formatting .dly record");
  }
  return line;
}

inline std::vector<RawDlyRecord> temperature_records(
    const std::vector<RawDlyRecord>& records) {
  std::vector<RawDlyRecord> out;
  for (const auto& r : records) {
    if (r.is_temperature()) out.push_back(r);
  }
  return out;
}

}  // namespace tempdyn::ghcn
