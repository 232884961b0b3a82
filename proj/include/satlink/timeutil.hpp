#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace satlink {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerHour = 3600;
inline constexpr Timestamp kSecondsPerDay = 86400;

// Parses "YYYY-MM-DDTHH:MM:SSZ" (the trailing Z is optional). Throws ParseError-free
// satlink::Error on malformed input.
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

// Nearest hour boundary; a tie at :30:00 resolves to the earlier hour.
Timestamp round_to_hour(Timestamp t);
Timestamp floor_to_hour(Timestamp t);

int minute_of_day(Timestamp t);
// 1-based, January 1st = 1.
int day_of_year(Timestamp t);

}  // namespace satlink
