#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ward/errors.hpp"
#include "ward/evaluation.hpp"
#include "ward/logistic.hpp"

using namespace ward;

namespace {

constexpr Timestamp kDay = 1699920000;  // 2023-11-14 00:00 UTC

BoundingBox box(ObjectClass c, double x, double y, double w, double h, double conf = 0.9) {
  return {c, x, y, w, h, conf};
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

CanonicalRecord pred_record(const std::string& sid, Timestamp ts, const std::vector<BoundingBox>& boxes,
                            const std::vector<std::optional<Role>>& roles) {
  CanonicalRecord r;
  r.detection.session_id = sid;
  r.detection.ts = ts;
  r.detection.boxes = boxes;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].cls == ObjectClass::person) {
      r.detection.roles.push_back(RoleDistribution::from_primary(roles[i].value_or(Role::other), 0.9));
    } else {
      r.detection.roles.push_back(std::nullopt);
    }
  }
  return r;
}

}  // namespace

TEST(Prf1, HandValues) {
  auto m = prf1(92, 8, 8);
  EXPECT_NEAR(m.precision, 0.92, 1e-12);
  EXPECT_NEAR(m.recall, 0.92, 1e-12);
  EXPECT_NEAR(m.f1, 0.92, 1e-12);
  m = prf1(0, 0, 0);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  m = prf1(3, 1, 2);
  EXPECT_NEAR(m.precision, 0.75, 1e-12);
  EXPECT_NEAR(m.recall, 0.6, 1e-12);
  EXPECT_NEAR(m.f1, 2 * 0.75 * 0.6 / 1.35, 1e-12);
}

TEST(Iou, MatchesClippingOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto r = [&](double lo, double hi) { return lo + (hi - lo) * oracle::uniform(rng); };
    const auto a = box(ObjectClass::person, r(0, 100), r(0, 100), r(1, 60), r(1, 60));
    const auto b = box(ObjectClass::person, r(0, 100), r(0, 100), r(1, 60), r(1, 60));
    EXPECT_NEAR(iou(a, b), oracle::iou_by_clipping(a, b), 1e-9);
  }
  const auto a = box(ObjectClass::person, 0, 0, 10, 10);
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, box(ObjectClass::person, 10, 0, 10, 10)), 0.0);
  EXPECT_NEAR(iou(a, box(ObjectClass::person, 5, 0, 10, 10)), 50.0 / 150.0, 1e-12);
}

TEST(Matcher, OnePredTwoGts) {
  const std::vector<BoundingBox> p{box(ObjectClass::person, 0, 0, 10, 10)};
  const std::vector<BoundingBox> g{box(ObjectClass::person, 0, 0, 10, 10), box(ObjectClass::person, 1, 0, 10, 10)};
  const auto m = match_boxes(p, g);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_EQ(m.pairs[0].second, 0u);
}

TEST(Matcher, HigherConfidenceClaimsFirst) {
  const std::vector<BoundingBox> g{box(ObjectClass::person, 0, 0, 10, 10)};
  const std::vector<BoundingBox> p{box(ObjectClass::person, 1, 0, 10, 10, 0.5),
                                   box(ObjectClass::person, 2, 0, 10, 10, 0.8)};
  const auto m = match_boxes(p, g);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].first, 1u);
  EXPECT_EQ(m.fp, 1u);
}

TEST(Matcher, ThresholdIsInclusive) {
  // IoU exactly 0.5: 10x10 vs 10x20 sharing the first box entirely
  const std::vector<BoundingBox> g{box(ObjectClass::person, 0, 0, 10, 20)};
  const std::vector<BoundingBox> p{box(ObjectClass::person, 0, 0, 10, 10)};
  EXPECT_EQ(match_boxes(p, g).tp, 1u);
  EXPECT_EQ(match_boxes(p, g, 0.51).tp, 0u);
}

TEST(Matcher, AgreesWithBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto r = [&](double lo, double hi) { return lo + (hi - lo) * oracle::uniform(rng); };
    std::vector<BoundingBox> p, g;
    const int np = static_cast<int>(r(0, 5.99)), ng = static_cast<int>(r(0, 5.99));
    for (int i = 0; i < ng; ++i) g.push_back(box(ObjectClass::person, r(0, 40), r(0, 40), r(10, 30), r(10, 30)));
    for (int i = 0; i < np; ++i)
      p.push_back(box(ObjectClass::person, r(0, 40), r(0, 40), r(10, 30), r(10, 30), r(0, 1)));
    const auto m = match_boxes(p, g, 0.3);
    EXPECT_EQ(m.tp, oracle::brute_force_tp(p, g, 0.3)) << "trial " << trial;
    EXPECT_EQ(m.tp + m.fp, p.size());
    EXPECT_EQ(m.tp + m.fn, g.size());
  }
}

TEST(FrameLabelTest, PatientAlone) {
  FrameLabel l;
  l.boxes = {box(ObjectClass::person, 0, 0, 5, 5), box(ObjectClass::bed, 0, 0, 50, 50)};
  l.roles = {Role::patient, std::nullopt};
  EXPECT_TRUE(l.patient_alone());
  l.boxes.push_back(box(ObjectClass::person, 10, 0, 5, 5));
  l.roles.push_back(Role::staff);
  EXPECT_FALSE(l.patient_alone());
  l.roles = {Role::staff};
  l.boxes = {box(ObjectClass::person, 0, 0, 5, 5)};
  EXPECT_FALSE(l.patient_alone());
}

TEST(FrameLabelTest, JsonRoundTrip) {
  FrameLabel l;
  l.session_id = "a";
  l.ts = 42;
  l.boxes = {box(ObjectClass::person, 1.5, 2, 3, 4, 1.0), box(ObjectClass::bed, 0, 0, 50, 50, 1.0)};
  l.roles = {Role::staff, std::nullopt};
  l.scene = SceneTag::in_bed;
  l.exception = true;
  const auto back = parse_frame_label_line(to_json_line(l));
  EXPECT_EQ(back.session_id, "a");
  EXPECT_EQ(back.ts, 42);
  EXPECT_EQ(back.boxes, l.boxes);
  EXPECT_EQ(back.roles, l.roles);
  EXPECT_EQ(back.scene, l.scene);
  EXPECT_TRUE(back.exception);
  EXPECT_EQ(code_of([] { parse_frame_label_line("{\"ts\":1}"); }), ErrorCode::MalformedRecord);
}

TEST(EvaluateFrames, ConstructedCorpusMacroF1) {
  // Per class: 92 exact hits, 8 frames where the prediction misses (FP + FN).
  std::vector<FrameLabel> labels;
  std::vector<CanonicalRecord> preds;
  for (int i = 0; i < 100; ++i) {
    FrameLabel l;
    l.session_id = "s";
    l.ts = i;
    l.boxes = {box(ObjectClass::person, 100, 100, 40, 80, 1), box(ObjectClass::bed, 300, 100, 200, 100, 1),
               box(ObjectClass::chair, 600, 100, 50, 50, 1)};
    l.roles = {Role::patient, std::nullopt, std::nullopt};
    labels.push_back(l);
    auto boxes = l.boxes;
    if (i >= 92)
      for (auto& b : boxes) b.x += 1000;
    preds.push_back(pred_record("s", i, boxes, l.roles));
  }
  const auto rep = evaluate_frames(labels, preds, PipelineConfig{});
  for (const auto& c : rep.per_class) {
    EXPECT_EQ(c.tp, 92u);
    EXPECT_EQ(c.fp, 8u);
    EXPECT_EQ(c.fn, 8u);
  }
  EXPECT_NEAR(rep.macro.f1, 0.92, 1e-12);
  EXPECT_EQ(rep.frames_evaluated, 100u);
}

TEST(EvaluateFrames, PatientRoleF1) {
  // 100 patient boxes; 98 labelled patient by the model, 2 as staff, plus 2
  // staff boxes the model calls patient.
  std::vector<FrameLabel> labels;
  std::vector<CanonicalRecord> preds;
  for (int i = 0; i < 102; ++i) {
    FrameLabel l;
    l.session_id = "s";
    l.ts = i;
    l.boxes = {box(ObjectClass::person, 100, 100, 40, 80, 1)};
    l.roles = {i < 100 ? Role::patient : Role::staff};
    labels.push_back(l);
    const Role guess = i < 98 ? Role::patient : (i < 100 ? Role::staff : Role::patient);
    preds.push_back(pred_record("s", i, l.boxes, {guess}));
  }
  const auto rep = evaluate_frames(labels, preds, PipelineConfig{});
  EXPECT_EQ(rep.patient_role.tp, 98u);
  EXPECT_EQ(rep.patient_role.fp, 2u);
  EXPECT_EQ(rep.patient_role.fn, 2u);
  EXPECT_NEAR(rep.patient_role.scores.f1, 0.98, 1e-12);
}

TEST(EvaluateFrames, ExceptionFramesAndAlignment) {
  FrameLabel l;
  l.session_id = "s";
  l.ts = 5;
  l.boxes = {box(ObjectClass::person, 0, 0, 10, 10)};
  l.roles = {Role::patient};
  l.exception = true;
  const std::vector<FrameLabel> labels{l};
  const std::vector<CanonicalRecord> none;
  PipelineConfig cfg;
  const auto rep = evaluate_frames(labels, none, cfg);
  EXPECT_EQ(rep.frames_excluded, 1u);
  EXPECT_EQ(rep.frames_evaluated, 0u);
  cfg.exclude_exception_frames = false;
  EXPECT_EQ(code_of([&] { evaluate_frames(labels, none, cfg); }), ErrorCode::MisalignedFrames);
}

TEST(EvaluateFrames, PatientAloneUsesLogicalState) {
  FrameLabel l;
  l.session_id = "s";
  l.ts = 1;
  l.boxes = {box(ObjectClass::person, 0, 0, 10, 10)};
  l.roles = {Role::patient};
  auto p = pred_record("s", 1, l.boxes, l.roles);
  const std::vector<FrameLabel> labels{l};
  auto rep = evaluate_frames(labels, std::span(&p, 1), PipelineConfig{});
  EXPECT_EQ(rep.patient_alone.tp, 1u);
  p.logical = LogicalState{"s", 1, false, false, true, false, 2.0};
  rep = evaluate_frames(labels, std::span(&p, 1), PipelineConfig{});
  EXPECT_EQ(rep.patient_alone.fn, 1u);
}

TEST(EvalPatientAlone, CountsAndAlignment) {
  std::vector<FrameLabel> labels(2);
  labels[0] = {"s", 1, {box(ObjectClass::person, 0, 0, 1, 1)}, {Role::patient}, std::nullopt, false};
  labels[1] = {"s", 2, {}, {}, std::nullopt, false};
  std::vector<LogicalState> st{{"s", 1, true, true, false, false, 1}, {"s", 2, true, true, false, false, 1}};
  const auto m = eval_patient_alone(st, labels);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 0u);
  st.pop_back();
  EXPECT_EQ(code_of([&] { eval_patient_alone(st, labels); }), ErrorCode::MisalignedFrames);
}

TEST(Logistic, MatchesMajorityRule) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 20 + static_cast<int>(oracle::uniform(rng) * 500);
    const double p0 = oracle::uniform(rng), p1 = oracle::uniform(rng), px = oracle::uniform(rng);
    std::vector<bool> x, y;
    for (int i = 0; i < n; ++i) {
      const bool xi = oracle::uniform(rng) < px;
      x.push_back(xi);
      y.push_back(oracle::uniform(rng) < (xi ? p1 : p0));
    }
    if (std::count(y.begin(), y.end(), true) % n == 0) continue;
    const auto fit = fit_logistic(x, y);
    EXPECT_NEAR(fit.accuracy, oracle::majority_rule_accuracy(x, y), 1e-9) << trial;
  }
}

TEST(Logistic, SeparableConverges) {
  std::vector<bool> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(i % 3 == 0);
    y.push_back(i % 3 == 0);
  }
  const auto fit = fit_logistic(x, y);
  EXPECT_DOUBLE_EQ(fit.accuracy, 1.0);
  EXPECT_GT(fit.slope, 0.0);
  EXPECT_LE(fit.iterations, kLogisticMaxIter);
}

TEST(Logistic, HandExample) {
  // x=0: 3 of 4 negative; x=1: 5 of 6 positive -> 8/10
  const std::vector<bool> x{0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  const std::vector<bool> y{0, 0, 0, 1, 1, 1, 1, 1, 1, 0};
  const auto fit = fit_logistic(x, y);
  EXPECT_NEAR(fit.accuracy, 0.8, 1e-12);
  // unpenalised optimum: intercept log(1/3), slope log(5) - log(1/3)
  EXPECT_NEAR(fit.intercept, std::log(1.0 / 3.0), 1e-3);
  EXPECT_NEAR(fit.slope, std::log(5.0) - std::log(1.0 / 3.0), 1e-3);
}

TEST(Logistic, Errors) {
  EXPECT_EQ(code_of([] { fit_logistic({1, 0}, {1, 1}); }), ErrorCode::SingleClassTarget);
  EXPECT_EQ(code_of([] { fit_logistic({}, {}); }), ErrorCode::EmptyPeriod);
  EXPECT_EQ(code_of([] { fit_logistic({1}, {1, 0}); }), ErrorCode::MisalignedFrames);
  EXPECT_EQ(code_of([] { manual_accuracy({}, {}); }), ErrorCode::EmptyPeriod);
  EXPECT_NEAR(manual_accuracy({1, 0, 1, 1}, {1, 1, 1, 0}), 0.5, 1e-12);
}

TEST(TrendAccuracy, DayNightAndManualFallback) {
  // One day: log says alone 08:00-09:00. AI matches exactly during the day
  // and says alone for the first night hour where the log says not alone.
  std::vector<LogicalState> st;
  for (Timestamp t = kDay; t < kDay + 86400; t += 60) {
    LogicalState s{"s", t, false, false, false, false, 0};
    const int h = static_cast<int>((t - kDay) / 3600);
    s.patient_alone = h == 8 || h == 0;
    st.push_back(s);
  }
  std::map<std::string, ObservationLog> logs{{"s", {"s", {{kDay + 8 * 3600, kDay + 9 * 3600}}}}};
  const auto rep = trend_accuracy(st, logs, PipelineConfig{});
  ASSERT_EQ(rep.rows.size(), 3u);
  const auto& day = rep.summary[static_cast<int>(Period::day)];
  const auto& night = rep.summary[static_cast<int>(Period::night)];
  EXPECT_EQ(day.logistic, 1u);
  EXPECT_NEAR(day.mean, 1.0, 1e-12);
  // night has no logged alone seconds: single class -> agreement rate
  EXPECT_EQ(night.manual, 1u);
  EXPECT_NEAR(night.mean, 1.0 - 60.0 / (9 * 60.0), 1e-12);
  EXPECT_EQ(rep.summary[static_cast<int>(Period::full)].patient_days, 1u);
}

TEST(TrendAccuracy, NoOverlap) {
  std::vector<LogicalState> st{{"a", kDay, false, false, false, false, 0}};
  std::map<std::string, ObservationLog> logs{{"b", {"b", {{kDay, kDay + 1}}}}};
  EXPECT_EQ(code_of([&] { trend_accuracy(st, logs, PipelineConfig{}); }), ErrorCode::NoOverlap);
}

TEST(TrendAccuracy, StdAcrossDays) {
  std::vector<LogicalState> st;
  for (int d = 0; d < 2; ++d)
    for (Timestamp t = kDay + d * 86400 + 10 * 3600; t < kDay + d * 86400 + 11 * 3600; t += 60)
      st.push_back({"s", t, false, d == 1 && t % 120 == 0, false, false, 0});
  std::map<std::string, ObservationLog> logs{{"s", {"s", {}}}};
  const auto rep = trend_accuracy(st, logs, PipelineConfig{});
  const auto& full = rep.summary[static_cast<int>(Period::full)];
  EXPECT_EQ(full.patient_days, 2u);
  EXPECT_EQ(full.manual, 2u);
  EXPECT_NEAR(full.mean, 0.75, 1e-12);
  EXPECT_NEAR(full.std, std::sqrt(2 * 0.25 * 0.25), 1e-12);
}
