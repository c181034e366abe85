#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "ward/errors.hpp"
#include "ward/simulator.hpp"

using namespace ward;

namespace {

constexpr Timestamp kDay = 1699920000;

OccupantSpec person(Role r, double x, Point v = {}) {
  return {"", r, {ObjectClass::person, x, 200, 40, 100, 1.0}, v};
}

ScenarioSpec one_hour_alone() {
  ScenarioSpec s;
  s.seed = 17;
  s.session_id = "p1";
  s.start_ts = kDay;
  s.duration_s = 3600;
  s.schedule = {{0, 3600, {person(Role::patient, 100)}, 0.0}};
  return s;
}

std::vector<LogicalState> truth_states(const SimulatedSession& s) {
  std::vector<LogicalState> v;
  for (const auto& r : s.truth) v.push_back(*r.logical);
  return v;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(Simulator, NoiselessHourAlone) {
  const auto spec = one_hour_alone();
  const auto sim = generate(spec);
  ASSERT_EQ(sim.truth.size(), 3600u);
  ASSERT_EQ(sim.detections.size(), 3600u);
  ASSERT_EQ(sim.log.intervals.size(), 1u);
  EXPECT_EQ(sim.log.intervals[0], (Interval{kDay, kDay + 3600}));
  const auto st = truth_states(sim);
  const auto t = aggregate_hourly(st);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t[0].alone, 60.0);
  for (std::size_t i = 0; i < 3600; ++i) {
    EXPECT_EQ(sim.detections[i].detection.person_count(), 1);
    EXPECT_TRUE(sim.detections[i].detection.has_role(Role::patient));
  }
}

TEST(Simulator, Deterministic) {
  auto spec = one_hour_alone();
  spec.noise = {0.1, 0.1, 0.1};
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_EQ(a.detections, b.detections);
  EXPECT_EQ(a.truth, b.truth);
  spec.seed = 18;
  const auto c = generate(spec);
  EXPECT_NE(a.detections, c.detections);
  EXPECT_EQ(a.truth, c.truth);
}

TEST(Simulator, NoiseRatesRoughlyHonoured) {
  auto spec = one_hour_alone();
  spec.noise = {0.2, 0.0, 0.0};
  const auto sim = generate(spec);
  int missing = 0;
  for (const auto& r : sim.detections) missing += r.detection.person_count() == 0;
  EXPECT_NEAR(missing / 3600.0, 0.2, 0.03);
}

TEST(Simulator, InvalidSchedules) {
  auto s = one_hour_alone();
  s.schedule = {{0, 1000, {}, 0}, {1001, 3600, {}, 0}};
  EXPECT_EQ(code_of([&] { generate(s); }), ErrorCode::InvalidSchedule);
  s.schedule = {{0, 2000, {}, 0}, {1500, 3600, {}, 0}};
  EXPECT_EQ(code_of([&] { generate(s); }), ErrorCode::InvalidSchedule);
  s.schedule = {{0, 3000, {}, 0}};
  EXPECT_EQ(code_of([&] { generate(s); }), ErrorCode::InvalidSchedule);
  s.schedule = {{0, 3600, {person(Role::patient, 1000, {1, 0})}, 0}};
  EXPECT_EQ(code_of([&] { generate(s); }), ErrorCode::InvalidSchedule);
}

TEST(Simulator, CrossingAtScheduledSecond) {
  ScenarioSpec s;
  s.session_id = "z";
  s.start_ts = kDay;
  s.duration_s = 200;
  s.zone = Polygon({{400, 200}, {700, 200}, {700, 500}, {400, 500}});
  s.zone_expansion = 0.0;
  // anchor x = 300.5 + t enters x >= 400 at t = 100
  s.schedule = {{0, 200, {{"a", Role::patient, {ObjectClass::person, 280.5, 300, 40, 100, 1}, {1, 0}}}, 0}};
  const auto sim = generate(s);
  ASSERT_EQ(sim.crossings.size(), 1u);
  EXPECT_EQ(sim.crossings[0].ts, kDay + 100);
  EXPECT_EQ(sim.crossings[0].direction, CrossingDirection::entry);
}

TEST(Simulator, StaffVisitBreaksAloneLog) {
  auto s = one_hour_alone();
  s.schedule = {{0, 1000, {person(Role::patient, 100)}, 0},
                {1000, 1300, {person(Role::patient, 100), person(Role::staff, 300)}, 0},
                {1300, 3600, {person(Role::patient, 100)}, 3.0}};
  const auto sim = generate(s);
  ASSERT_EQ(sim.log.intervals.size(), 2u);
  EXPECT_EQ(sim.log.intervals[0], (Interval{kDay, kDay + 1000}));
  EXPECT_EQ(sim.log.intervals[1], (Interval{kDay + 1300, kDay + 3600}));
  const auto st = truth_states(sim);
  EXPECT_TRUE(st[1100].supervised_by_staff);
  EXPECT_FALSE(st[1100].moving);
  EXPECT_TRUE(st[2000].moving);
  EXPECT_NEAR(sim.detections[2000].motion->scene.value(), s.expected_scene_motion(3.0), 1e-12);
}

TEST(Simulator, ParseCountsScenario) {
  const auto s = parse_scenario(R"({"seed":3,"session_id":"q","start_ts":1699920000,"duration_s":60,
    "schedule":[{"start":0,"end":30,"counts":{"patient":1}},
                {"start":30,"end":60,"motion":1.5,"counts":{"patient":1,"staff":2}}]})");
  EXPECT_EQ(s.seed, 3u);
  ASSERT_EQ(s.schedule.size(), 2u);
  EXPECT_EQ(s.schedule[1].occupants.size(), 3u);
  EXPECT_DOUBLE_EQ(s.schedule[1].motion_speed, 1.5);
  EXPECT_EQ(code_of([] { parse_scenario(R"({"duration_s":10,"schedule":[{"start":0,"end":5}]})"); }),
            ErrorCode::InvalidSchedule);
}

TEST(FrameSynth, DriftAndDeterminism) {
  auto s = one_hour_alone();
  s.duration_s = 10;
  s.schedule = {{0, 5, {person(Role::patient, 100)}, 0.0}, {5, 10, {person(Role::patient, 100)}, 3.0}};
  const FrameSynth a(s), b(s);
  EXPECT_DOUBLE_EQ(a.patch_offset(0), 0.0);
  EXPECT_DOUBLE_EQ(a.patch_offset(5), 3.0);
  EXPECT_DOUBLE_EQ(a.patch_offset(9), 15.0);
  const Frame f = a.render(7);
  EXPECT_EQ(f.dims(), s.render_dims);
  EXPECT_EQ(f.mode(), FrameMode::NIR);
  EXPECT_EQ(f.ts(), kDay + 7);
  const Frame g = b.render(7);
  EXPECT_TRUE(std::equal(f.pixels().begin(), f.pixels().end(), g.pixels().begin()));
}
