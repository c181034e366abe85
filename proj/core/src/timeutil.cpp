#include "ward/timeutil.hpp"

#include <chrono>
#include <cstdio>

namespace ward {

namespace {

long long floor_div(long long a, long long b) noexcept {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

long long local_day_index(Timestamp ts, int utc_offset_s) noexcept {
  return floor_div(ts + utc_offset_s, 86400);
}

std::string format_date(long long day_index) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

ClockPosition clock_position(Timestamp ts, int utc_offset_s) {
  const long long local = ts + utc_offset_s;
  const long long day = floor_div(local, 86400);
  const int sod = static_cast<int>(local - day * 86400);
  return {format_date(day), sod / 3600, sod};
}

}  // namespace ward
