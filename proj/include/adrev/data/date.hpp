#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace adrev::data {

using Date = std::chrono::sys_days;

/// Strict ISO-8601 calendar date (YYYY-MM-DD); throws DataError otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Monday = 0 ... Sunday = 6.
int day_of_week(Date date);
/// 1-based ordinal day within the year.
int day_of_year(Date date);

}  // namespace adrev::data
