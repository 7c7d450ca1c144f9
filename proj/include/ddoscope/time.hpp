#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace ddoscope {

/// Microseconds since the Unix epoch, UTC.
using Micros = std::int64_t;
using Date = std::chrono::sys_days;

inline constexpr Micros kMicrosPerSecond = 1'000'000;
inline constexpr Micros kMicrosPerDay = 86'400 * kMicrosPerSecond;

constexpr Micros seconds_to_micros(double seconds) {
  return static_cast<Micros>(seconds * kMicrosPerSecond + (seconds >= 0 ? 0.5 : -0.5));
}

/// UTC calendar day containing the timestamp.
Date date_of(Micros ts);
Micros micros_of(Date day);

/// Monday on or before `day` (ISO week start).
Date week_start(Date day);
/// First day of the calendar quarter containing `day`.
Date quarter_start(Date day);
Date next_quarter_start(Date day);

Date parse_date(std::string_view text);
std::string format_date(Date day);
/// "2021Q3"-style label for the quarter containing `day`.
std::string quarter_label(Date day);

}  // namespace ddoscope
