#pragma once

#include <string>

#include "ward/types.hpp"

namespace ward {

// Wall-clock position of a timestamp after applying a fixed UTC offset.
struct ClockPosition {
  std::string date;  // YYYY-MM-DD
  int hour = 0;      // 0..23
  int second_of_day = 0;
};

ClockPosition clock_position(Timestamp ts, int utc_offset_s = 0);

// Days since epoch for the local calendar date containing ts.
long long local_day_index(Timestamp ts, int utc_offset_s = 0) noexcept;

std::string format_date(long long day_index);

}  // namespace ward
