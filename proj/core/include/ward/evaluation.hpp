#pragma once

// Frame-level detection metrics and per-second trend accuracy.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ward/config.hpp"
#include "ward/logic.hpp"
#include "ward/record_io.hpp"
#include "ward/trends.hpp"

namespace ward {

double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred, gt)
};

// Predictions in descending confidence (stable) each take the unmatched gt
// with the highest IoU >= threshold; ties go to the lower gt index. Classes
// are not checked here, callers pass same-class lists.
MatchResult match_boxes(std::span<const BoundingBox> preds, std::span<const BoundingBox> gts,
                        double iou_threshold = 0.5);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero denominators give 0.
Prf1 prf1(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

struct ClassMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  Prf1 scores;

  void add(std::size_t tp_, std::size_t fp_, std::size_t fn_) noexcept;
  void finish() noexcept { scores = prf1(tp, fp, fn); }
};

enum class SceneTag { in_bed, not_in_bed };

struct FrameLabel {
  std::string session_id;
  Timestamp ts = 0;
  std::vector<BoundingBox> boxes;
  std::vector<std::optional<Role>> roles;  // parallel to boxes, set for persons
  std::optional<SceneTag> scene;
  bool exception = false;

  // Unsmoothed ground truth: fewer than two persons and one of them the patient.
  bool patient_alone() const noexcept;
};

// JSONL with the canonical box layout; roles are role names or null.
std::vector<FrameLabel> read_frame_labels(const std::filesystem::path& path);
std::string to_json_line(const FrameLabel& label);
FrameLabel parse_frame_label_line(std::string_view line);

struct EvalReport {
  std::array<ClassMetrics, 3> per_class;  // indexed by ObjectClass
  Prf1 macro;
  ClassMetrics patient_role;
  ClassMetrics patient_alone;
  std::size_t frames_evaluated = 0;
  std::size_t frames_excluded = 0;
};

// Aligns predictions to labels by (session_id, ts); each included label needs
// a prediction (MisalignedFrames otherwise). Predicted alone comes from the
// record's logical state when present, else from its own boxes.
EvalReport evaluate_frames(std::span<const FrameLabel> labels, std::span<const CanonicalRecord> preds,
                           const PipelineConfig& cfg);

// Alone is the positive class. Throws MisalignedFrames when a label has no state.
ClassMetrics eval_patient_alone(std::span<const LogicalState> preds, std::span<const FrameLabel> labels);

std::string eval_report_json(const EvalReport& report);
void write_eval_csv(std::ostream& out, const EvalReport& report);

enum class Period { day, night, full };
std::string_view to_string(Period p) noexcept;

struct TrendAccuracyRow {
  std::string session_id;
  std::string date;
  Period period = Period::full;
  std::string method;  // "logistic" or "manual"
  double accuracy = 0.0;
  std::size_t seconds = 0;
};

struct PeriodSummary {
  Period period = Period::full;
  std::size_t patient_days = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single day
  std::size_t logistic = 0;
  std::size_t manual = 0;
};

struct TrendAccuracyReport {
  std::vector<TrendAccuracyRow> rows;
  std::array<PeriodSummary, 3> summary;
};

bool in_day_period(int hour, const PipelineConfig& cfg) noexcept;

// Per patient-day (local calendar date) and period, compares AI patient_alone
// against the logged status at every second with a state. Logistic accuracy
// when the period has both classes, agreement rate otherwise. Sessions
// without a log are skipped; a log without states throws NoOverlap.
TrendAccuracyReport trend_accuracy(std::span<const LogicalState> states,
                                   const std::map<std::string, ObservationLog>& logs, const PipelineConfig& cfg);

std::string trend_accuracy_json(const TrendAccuracyReport& report);
void write_trend_accuracy_csv(std::ostream& out, const TrendAccuracyReport& report);

}  // namespace ward
