#include "satlink/timeutil.hpp"

#include <chrono>
#include <cstdio>

#include "satlink/error.hpp"

namespace satlink {

namespace {

Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  std::string buf(text);
  int n = std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail);
  bool ok = (n == 6 || (n == 7 && tail == 'Z'));
  if (ok && n == 7 && buf.size() != 20) ok = false;
  if (ok && n == 6 && buf.size() != 19) ok = false;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ok || !ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) {
    throw Error("malformed ISO-8601 timestamp '" + buf + "'");
  }
  Timestamp days = sys_days{ymd}.time_since_epoch().count();
  return days * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  Timestamp days = floor_div(t, kSecondsPerDay);
  Timestamp rem = t - days * kSecondsPerDay;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char out[32];
  std::snprintf(out, sizeof(out), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                static_cast<int>(rem % 60));
  return out;
}

Timestamp floor_to_hour(Timestamp t) { return floor_div(t, kSecondsPerHour) * kSecondsPerHour; }

Timestamp round_to_hour(Timestamp t) {
  Timestamp base = floor_to_hour(t);
  return (t - base) > kSecondsPerHour / 2 ? base + kSecondsPerHour : base;
}

int minute_of_day(Timestamp t) {
  Timestamp rem = t - floor_div(t, kSecondsPerDay) * kSecondsPerDay;
  return static_cast<int>(rem / 60);
}

int day_of_year(Timestamp t) {
  using namespace std::chrono;
  Timestamp days = floor_div(t, kSecondsPerDay);
  sys_days sd{std::chrono::days{days}};
  year_month_day ymd{sd};
  sys_days jan1{ymd.year() / January / 1};
  return static_cast<int>((sd - jan1).count()) + 1;
}

}  // namespace satlink
