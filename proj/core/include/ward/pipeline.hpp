#pragma once

// Per-second streaming runtime: preprocess, detect, validate, flow, ROI
// motion, smoothing window, logical state, sink.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ward/config.hpp"
#include "ward/detector.hpp"
#include "ward/flow.hpp"
#include "ward/geometry.hpp"
#include "ward/logic.hpp"
#include "ward/store.hpp"
#include "ward/validate.hpp"

namespace ward {

// State carried between seconds of one session: the smoothing window, the
// previous flow frame and the previous detection. Nothing else grows with
// session length.
class SessionPipeline {
 public:
  SessionPipeline(std::string session_id, const PipelineConfig& cfg);

  // Seconds must arrive in increasing ts. Crossing events, when a zone is
  // configured, are appended to `crossings`.
  CanonicalRecord step(const SourceItem& item, DetectorPort& detector,
                       std::vector<CrossingEvent>* crossings = nullptr);

  const std::string& session_id() const noexcept { return session_id_; }
  std::size_t window_size() const noexcept { return window_.size(); }
  bool holds_previous_frame() const noexcept { return prev_gray_.has_value(); }

 private:
  DetectionRecord to_record(const SourceItem& item, const DetectorOutput& out) const;

  std::string session_id_;
  const PipelineConfig& cfg_;
  RecordValidator validator_;
  SmoothingWindow window_;
  std::optional<GrayImage> prev_gray_;
  std::optional<DetectionRecord> prev_det_;
  std::optional<Timestamp> prev_ts_;
  std::optional<RoiMask> zone_analysis_;
  std::optional<RoiMask> zone_flow_;
};

struct RunSummary {
  std::size_t records = 0;
  std::size_t sessions = 0;
  std::vector<CrossingEvent> crossings;  // sorted by (session, ts, person)
};

// Single stream, sessions may interleave. Errors from the detector are
// rethrown as AdapterError with session/ts context.
RunSummary run_pipeline(Source& source, DetectorPort& detector, const PipelineConfig& cfg, RecordSink& sink);

struct SessionJob {
  std::unique_ptr<Source> source;
  std::unique_ptr<DetectorPort> detector;
};

// One job per session, run on up to `threads` workers. The sink must accept
// concurrent appends from different sessions (Store does).
RunSummary run_sessions_parallel(std::vector<SessionJob> jobs, const PipelineConfig& cfg, RecordSink& sink,
                                 unsigned threads);

void write_crossings_csv(std::ostream& out, const std::vector<CrossingEvent>& events);

class VectorSink : public RecordSink {
 public:
  void append(const CanonicalRecord& rec) override {
    std::lock_guard lock(mu_);
    rows.push_back(rec);
  }
  std::vector<CanonicalRecord> rows;

 private:
  std::mutex mu_;
};

}  // namespace ward
