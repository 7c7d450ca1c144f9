#include "ddoscope/time.hpp"

#include <charconv>
#include <cstdio>

#include "ddoscope/error.hpp"

namespace ddoscope {

using namespace std::chrono;

Date date_of(Micros ts) {
  return floor<days>(sys_time<microseconds>{microseconds{ts}});
}

Micros micros_of(Date day) {
  return duration_cast<microseconds>(day.time_since_epoch()).count();
}

Date week_start(Date day) {
  const weekday wd{day};
  return day - days{(wd.c_encoding() + 6) % 7};
}

Date quarter_start(Date day) {
  const year_month_day ymd{day};
  const unsigned m = static_cast<unsigned>(ymd.month());
  const unsigned first = ((m - 1) / 3) * 3 + 1;
  return sys_days{ymd.year() / month{first} / 1};
}

Date next_quarter_start(Date day) {
  const year_month_day ymd{quarter_start(day)};
  return sys_days{(ymd.year() / ymd.month() / 1) + months{3}};
}

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto bad = [&] { return DataError("malformed date (want YYYY-MM-DD): '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  const char* s = text.data();
  if (std::from_chars(s, s + 4, y).ptr != s + 4) throw bad();
  if (std::from_chars(s + 5, s + 7, m).ptr != s + 7) throw bad();
  if (std::from_chars(s + 8, s + 10, d).ptr != s + 10) throw bad();
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw bad();
  return sys_days{ymd};
}

std::string format_date(Date day) {
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string quarter_label(Date day) {
  const year_month_day ymd{day};
  const unsigned q = (static_cast<unsigned>(ymd.month()) - 1) / 3 + 1;
  return std::to_string(static_cast<int>(ymd.year())) + "Q" + std::to_string(q);
}

}  // namespace ddoscope
