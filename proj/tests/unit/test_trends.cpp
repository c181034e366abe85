#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include "ward/errors.hpp"
#include "ward/trends.hpp"

using namespace ward;

namespace {

// 2023-11-14 00:00:00 UTC
constexpr Timestamp kDay = 1699920000;

std::vector<LogicalState> states(Timestamp from, int n, const std::function<bool(int)>& alone) {
  std::vector<LogicalState> v;
  for (int i = 0; i < n; ++i) {
    LogicalState s;
    s.session_id = "s";
    s.ts = from + i;
    s.patient_alone = alone(i);
    s.person_alone = s.patient_alone;
    s.moving = i % 3 == 0;
    s.supervised_by_staff = !s.person_alone;
    v.push_back(s);
  }
  return v;
}

}  // namespace

TEST(AggregateHourly, FullHourAlone) {
  const auto t = aggregate_hourly(states(kDay + 3600, 3600, [](int) { return true; }));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].hour, 1);
  EXPECT_EQ(t[0].date, "2023-11-14");
  EXPECT_DOUBLE_EQ(t[0].alone, 60.0);
  EXPECT_DOUBLE_EQ(t[0].monitored_minutes, 60.0);
}

TEST(AggregateHourly, HalfMonitoredQuarterAlone) {
  const auto t = aggregate_hourly(states(kDay, 1800, [](int i) { return i < 900; }));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t[0].monitored_minutes, 30.0);
  EXPECT_DOUBLE_EQ(t[0].alone, 15.0);
}

TEST(AggregateHourly, EmptyHourHasNoRow) {
  auto a = states(kDay, 100, [](int) { return true; });
  const auto b = states(kDay + 2 * 3600, 100, [](int) { return true; });
  a.insert(a.end(), b.begin(), b.end());
  const auto t = aggregate_hourly(a);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].hour, 0);
  EXPECT_EQ(t[1].hour, 2);
}

TEST(AggregateHourly, UnsortedAndMixedSessions) {
  auto a = states(kDay, 10, [](int) { return true; });
  std::swap(a[3], a[4]);
  try {
    aggregate_hourly(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsortedInput);
  }
  a = states(kDay, 10, [](int) { return true; });
  a[5].session_id = "t";
  EXPECT_THROW(aggregate_hourly(a), Error);
}

TEST(AggregateHourly, AdditiveOverDisjointRanges) {
  const auto all = states(kDay, 7200, [](int i) { return (i / 97) % 2 == 0; });
  const auto whole = aggregate_hourly(all);
  const auto first = aggregate_hourly(std::span(all).subspan(0, 3600));
  const auto second = aggregate_hourly(std::span(all).subspan(3600));
  ASSERT_EQ(whole.size(), 2u);
  EXPECT_EQ(whole[0], first[0]);
  EXPECT_EQ(whole[1], second[0]);
}

TEST(AggregateHourly, UtcOffsetShiftsHours) {
  const auto t = aggregate_hourly(states(kDay, 60, [](int) { return true; }), -3600);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].date, "2023-11-13");
  EXPECT_EQ(t[0].hour, 23);
}

TEST(Cohort, MeanPerHourWithCounts) {
  HourlyTrend a{"a", "2023-11-14", 14, 60, 10, 0, 0, 0};
  HourlyTrend b{"b", "2023-11-14", 14, 60, 20, 0, 0, 0};
  HourlyTrend c{"c", "2023-11-15", 3, 60, 5, 0, 0, 0};
  const std::vector<HourlyTrend> rows{a, b, c};
  const auto co = cohort_average(rows);
  ASSERT_EQ(co.size(), 24u);
  EXPECT_DOUBLE_EQ(*co[14].alone, 15.0);
  EXPECT_EQ(co[14].patient_days, 2);
  EXPECT_DOUBLE_EQ(*co[3].alone, 5.0);
  EXPECT_EQ(co[3].patient_days, 1);
  EXPECT_FALSE(co[0].alone.has_value());
  EXPECT_EQ(co[0].patient_days, 0);
}

TEST(Cohort, IdenticalTrendsAreFixedPoint) {
  HourlyTrend a{"a", "2023-11-14", 9, 42, 11, 3, 4, 7};
  HourlyTrend b = a;
  b.session_id = "b";
  const std::vector<HourlyTrend> rows{a, b};
  const auto co = cohort_average(rows);
  EXPECT_DOUBLE_EQ(*co[9].monitored_minutes, 42);
  EXPECT_DOUBLE_EQ(*co[9].alone, 11);
  EXPECT_DOUBLE_EQ(*co[9].alone_and_moving, 3);
  EXPECT_DOUBLE_EQ(*co[9].supervised_by_staff, 4);
  EXPECT_DOUBLE_EQ(*co[9].moving, 7);
}

TEST(LogToStates, IntervalCounts) {
  const auto v = log_to_states({"s", {{100, 160}}}, {0, 3600});
  EXPECT_EQ(std::count(v.begin(), v.end(), true), 60);
  EXPECT_TRUE(v[100]);
  EXPECT_FALSE(v[160]);
  const auto e = log_to_states({"s", {}}, {0, 3600});
  EXPECT_EQ(std::count(e.begin(), e.end(), true), 0);
}

TEST(LogToStates, Errors) {
  try {
    log_to_states({"s", {{0, 10}, {5, 20}}}, {0, 100});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlappingIntervals);
  }
  try {
    log_to_states({"s", {{90, 110}}}, {0, 100});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IntervalOutOfBounds);
  }
  // touching intervals are fine
  EXPECT_NO_THROW(log_to_states({"s", {{10, 20}, {0, 10}}}, {0, 100}));
}

TEST(Assisted, LogReplacesAloneExactly) {
  // AI says the opposite of the log every second
  const auto ai = states(kDay, 3600, [](int i) { return i >= 1000; });
  const ObservationLog log{"s", {{kDay, kDay + 1000}}};
  const auto t = assisted_trends(ai, log);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0].alone, 1000.0 / 60.0, 1e-12);
  // moving is retained from the AI stream
  EXPECT_NEAR(t[0].moving, aggregate_hourly(ai)[0].moving, 1e-12);
}

TEST(Assisted, IdentityWhenLogMatches) {
  const auto ai = states(kDay, 3600, [](int i) { return i >= 1000 && i < 2500; });
  const ObservationLog log{"s", {{kDay + 1000, kDay + 2500}}};
  EXPECT_EQ(assisted_trends(ai, log), aggregate_hourly(ai));
}

TEST(TrendCsv, HeaderAndRows) {
  std::ostringstream os;
  const std::vector<HourlyTrend> t{{"s", "2023-11-14", 5, 60, 30, 20, 10, 5}};
  write_trend_csv(os, t);
  EXPECT_EQ(os.str(),
            "# schema=ward-sentinel/hourly-trend schema_version=1\n"
            "session_id,date,hour,monitored_min,alone_min,moving_min,alone_moving_min,supervised_min\n"
            "s,2023-11-14,5,60.000000,30.000000,5.000000,20.000000,10.000000\n");
}
