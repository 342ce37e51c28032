#include "fcmarket/timeutil.hpp"

#include <cstdio>

namespace fcmarket {

using namespace std::chrono;

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == 'Z' || s.back() == 'z' || s.back() == ' ' || s.back() == '\r'))
    s.pop_back();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char sep = 0;
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep, &h, &mi, &se);
  if (n == 3) {
    h = mi = se = 0;
  } else if (n < 6 || (sep != 'T' && sep != ' ')) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) return std::nullopt;
  return sys_seconds{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{se};
}

std::string format_iso8601(Timestamp t) {
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

int hour_of_day(Timestamp t) {
  auto dp = floor<days>(t);
  return static_cast<int>(hh_mm_ss{t - dp}.hours().count());
}

int month_index(Timestamp t) {
  year_month_day ymd{floor<days>(t)};
  return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

Timestamp make_timestamp(int y, unsigned m, unsigned d, int h) {
  return sys_seconds{sys_days{year{y} / month{m} / day{d}}} + hours{h};
}

}  // namespace fcmarket
