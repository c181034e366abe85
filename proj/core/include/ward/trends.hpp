#pragma once

// Hourly trend aggregation, cohort norms and log-assisted trends.

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ward/logic.hpp"

namespace ward {

// Minutes spent in each state during one clock hour of one session. "alone"
// is the patient-alone state.
struct HourlyTrend {
  std::string session_id;
  std::string date;  // YYYY-MM-DD in local (offset) time
  int hour = 0;
  double monitored_minutes = 0.0;
  double alone = 0.0;
  double alone_and_moving = 0.0;
  double supervised_by_staff = 0.0;
  double moving = 0.0;

  bool operator==(const HourlyTrend&) const = default;
};

// Seconds missing from the stream count towards neither the numerators nor
// monitored_minutes; hours without any second produce no row.
// Throws UnsortedInput unless timestamps strictly increase, and
// InvalidArgument when states from several sessions are mixed.
std::vector<HourlyTrend> aggregate_hourly(std::span<const LogicalState> states, int utc_offset_s = 0);

struct CohortHour {
  int hour = 0;
  int patient_days = 0;  // rows contributing to this hour
  // Unweighted means over contributing rows; empty when patient_days == 0.
  std::optional<double> monitored_minutes;
  std::optional<double> alone;
  std::optional<double> alone_and_moving;
  std::optional<double> supervised_by_staff;
  std::optional<double> moving;
};

// 24 rows, one per hour of day, averaging each patient-day equally.
std::vector<CohortHour> cohort_average(std::span<const HourlyTrend> trends);

// Half-open [start, end) second interval.
struct Interval {
  Timestamp start = 0;
  Timestamp end = 0;

  Timestamp length() const noexcept { return end - start; }
  bool operator==(const Interval&) const = default;
};

struct ObservationLog {
  std::string session_id;
  std::vector<Interval> intervals;  // patient alone
};

// Sorts intervals; throws OverlappingIntervals or MalformedRecord (empty interval).
ObservationLog normalize_log(ObservationLog log);

using SecondGrid = Interval;

// Per-second alone flags over the grid. Throws IntervalOutOfBounds when an
// interval leaves the grid and OverlappingIntervals on overlap.
std::vector<bool> log_to_states(const ObservationLog& log, SecondGrid grid);

// Smallest grid covering both the states and the log.
SecondGrid covering_grid(std::span<const LogicalState> states, const ObservationLog& log);

// Replaces per-second alone with the logged status, keeps AI moving and
// supervision, then aggregates.
std::vector<HourlyTrend> assisted_trends(std::span<const LogicalState> states, const ObservationLog& log,
                                         int utc_offset_s = 0);

// session_id,start_ts,end_ts
std::map<std::string, ObservationLog> read_observation_logs(const std::filesystem::path& path);
void write_observation_logs(std::ostream& out, const std::vector<ObservationLog>& logs);

void write_trend_csv(std::ostream& out, std::span<const HourlyTrend> trends);
void write_cohort_csv(std::ostream& out, std::span<const CohortHour> cohort);

}  // namespace ward
