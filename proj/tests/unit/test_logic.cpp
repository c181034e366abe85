#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ward/errors.hpp"
#include "ward/logic.hpp"

using namespace ward;

namespace {

DetectionRecord rec(Timestamp ts, const std::vector<Role>& roles) {
  DetectionRecord r{"s", ts, {}, {}};
  for (std::size_t i = 0; i < roles.size(); ++i) {
    r.boxes.push_back({ObjectClass::person, 10.0 * i, 0, 10, 10, 0.9});
    r.roles.push_back(RoleDistribution::from_primary(roles[i], 0.9));
  }
  return r;
}

LogicalState run(const std::vector<DetectionRecord>& recs, const std::vector<double>& motion = {}) {
  PipelineConfig cfg;
  SmoothingWindow w(cfg.smoothing_window_s);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    w.push(recs[i], i < motion.size() ? std::optional<double>(motion[i]) : std::nullopt);
  }
  return derive_state(w, cfg);
}

}  // namespace

TEST(AttributeRole, EqualSplitOfResidual) {
  auto a = attribute_role(RoleConfidences::single(Role::patient, 0.9));
  EXPECT_NEAR(a.distribution.score(Role::patient), 0.9, 1e-12);
  EXPECT_NEAR(a.distribution.score(Role::staff), 0.05, 1e-12);
  EXPECT_NEAR(a.distribution.score(Role::other), 0.05, 1e-12);

  a = attribute_role(RoleConfidences::single(Role::staff, 0.4));
  EXPECT_NEAR(a.distribution.score(Role::staff), 0.4, 1e-12);
  EXPECT_NEAR(a.distribution.score(Role::patient), 0.3, 1e-12);
  EXPECT_NEAR(a.distribution.score(Role::other), 0.3, 1e-12);
  EXPECT_FALSE(a.no_role_signal);
}

TEST(AttributeRole, TieGoesToPatient) {
  RoleConfidences rc;
  rc.by_role = {0.5, 0.5, std::nullopt};
  const auto a = attribute_role(rc);
  EXPECT_EQ(a.distribution.argmax(), Role::patient);
  EXPECT_NEAR(a.distribution.score(Role::patient), 0.5, 1e-12);
  EXPECT_NEAR(a.distribution.score(Role::staff), 0.25, 1e-12);
  EXPECT_NEAR(a.distribution.score(Role::other), 0.25, 1e-12);
}

TEST(AttributeRole, NoSignalIsUniformAndFlagged) {
  const auto a = attribute_role(RoleConfidences{});
  EXPECT_TRUE(a.no_role_signal);
  EXPECT_EQ(a.distribution, RoleDistribution::uniform());
}

TEST(Window, EvictsOldest) {
  SmoothingWindow w(5);
  for (Timestamp t = 0; t < 6; ++t) w.push(rec(t, {Role::patient}), std::nullopt);
  EXPECT_EQ(w.size(), 5u);
  EXPECT_EQ(w.entries().front().ts, 1);
}

TEST(Window, GapRestarts) {
  SmoothingWindow w(5);
  for (Timestamp t = 0; t < 4; ++t) w.push(rec(t, {Role::patient}), std::nullopt);
  w = update_window(w, rec(13, {Role::patient}), MotionRecord{"s", 13, {}, {}, {}});
  EXPECT_EQ(w.size(), 1u);
}

TEST(Window, DuplicateTimestampRejected) {
  SmoothingWindow w(5);
  w.push(rec(3, {}), std::nullopt);
  try {
    w.push(rec(3, {}), std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrderRecord);
  }
}

TEST(DeriveState, PatientAloneStill) {
  std::vector<DetectionRecord> r;
  for (Timestamp t = 0; t < 5; ++t) r.push_back(rec(t, {Role::patient}));
  const auto s = run(r, {0, 0, 0, 0, 0});
  EXPECT_TRUE(s.person_alone);
  EXPECT_TRUE(s.patient_alone);
  EXPECT_FALSE(s.supervised_by_staff);
  EXPECT_FALSE(s.moving);
}

TEST(DeriveState, AverageBelowTwoIsAlone) {
  std::vector<DetectionRecord> r;
  const int counts[] = {1, 1, 1, 3, 3};
  for (Timestamp t = 0; t < 5; ++t) r.push_back(rec(t, std::vector<Role>(counts[t], Role::other)));
  const auto s = run(r);
  EXPECT_DOUBLE_EQ(s.smoothed_person_count, 1.8);
  EXPECT_TRUE(s.person_alone);
  EXPECT_FALSE(s.patient_alone);
}

TEST(DeriveState, TwoWithStaffIsSupervised) {
  std::vector<DetectionRecord> r;
  for (Timestamp t = 0; t < 5; ++t) r.push_back(rec(t, {Role::patient, Role::staff}));
  const auto s = run(r);
  EXPECT_TRUE(s.supervised_by_staff);
  EXPECT_FALSE(s.person_alone);
}

TEST(DeriveState, MovingUsesMeanOfAvailableMotion) {
  PipelineConfig cfg;
  SmoothingWindow w(5);
  w.push(rec(0, {Role::patient}), 2.0);
  w.push(rec(1, {Role::patient}), std::nullopt);
  w.push(rec(2, {Role::patient}), 0.0);
  EXPECT_TRUE(derive_state(w, cfg).moving);  // (2 + 0) / 2 = 1 > 0.5
  w.push(rec(3, {Role::patient}), 0.0);
  EXPECT_TRUE(derive_state(w, cfg).moving);  // 2/3
  w.push(rec(5, {Role::patient}), 0.0);
  EXPECT_FALSE(derive_state(w, cfg).moving);  // ts 0 evicted
}

TEST(DeriveState, EmptyWindow) {
  try {
    derive_state(SmoothingWindow(5), PipelineConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyWindow);
  }
}

TEST(DeriveState, MatchesBruteForceOnRandomStream) {
  std::mt19937_64 rng(77);
  PipelineConfig cfg;
  SmoothingWindow w(cfg.smoothing_window_s);
  std::vector<oracle::StreamSecond> stream;
  std::vector<LogicalState> got;
  Timestamp ts = 100;
  for (int i = 0; i < 2000; ++i) {
    ts += oracle::uniform(rng) < 0.05 ? 2 + static_cast<Timestamp>(oracle::uniform(rng) * 8) : 1;
    std::vector<Role> roles;
    const int n = static_cast<int>(oracle::uniform(rng) * 4);
    for (int k = 0; k < n; ++k) roles.push_back(static_cast<Role>(static_cast<int>(oracle::uniform(rng) * 3)));
    const auto r = rec(ts, roles);
    const bool has_m = oracle::uniform(rng) < 0.8;
    const double m = oracle::uniform(rng) * 1.2;
    w.push(r, has_m ? std::optional<double>(m) : std::nullopt);
    got.push_back(derive_state(w, cfg));
    stream.push_back({ts, n, r.has_role(Role::patient), r.has_role(Role::staff), has_m, m});
  }
  const auto want = oracle::brute_force_states("s", stream, cfg);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_EQ(got[i].person_alone, want[i].person_alone) << i;
    ASSERT_EQ(got[i].patient_alone, want[i].patient_alone) << i;
    ASSERT_EQ(got[i].supervised_by_staff, want[i].supervised_by_staff) << i;
    ASSERT_EQ(got[i].moving, want[i].moving) << i;
  }
}
