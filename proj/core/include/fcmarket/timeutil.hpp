#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace fcmarket {

using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM[:SS][Z]" and the space-separated variant.
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

int hour_of_day(Timestamp t);
// Months since year 0, used to bucket rows into calendar months.
int month_index(Timestamp t);

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0);

}  // namespace fcmarket
