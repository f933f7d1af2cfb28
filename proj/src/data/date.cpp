#include "adrev/data/date.hpp"

#include <charconv>
#include <cstdio>

#include "adrev/error.hpp"

namespace adrev::data {

namespace {

int parse_field(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("unparseable date '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("unparseable date '" + std::string(text) + "'");
  }
  const int y = parse_field(text.substr(0, 4), text);
  const int m = parse_field(text.substr(5, 2), text);
  const int d = parse_field(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

int day_of_week(Date date) { return static_cast<int>(std::chrono::weekday{date}.iso_encoding()) - 1; }

int day_of_year(Date date) {
  const std::chrono::year_month_day ymd{date};
  const Date first{ymd.year() / std::chrono::January / 1};
  return static_cast<int>((date - first).count()) + 1;
}

}  // namespace adrev::data
