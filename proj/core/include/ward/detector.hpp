#pragma once

// Detector port and the frame/record sources that feed the pipeline.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ward/logic.hpp"
#include "ward/preprocess.hpp"
#include "ward/record_io.hpp"
#include "ward/simulator.hpp"

namespace ward {

// One second of input for one session: a frame, a pre-recorded detection,
// or both.
struct SourceItem {
  std::string session_id;
  Timestamp ts = 0;
  std::optional<Frame> frame;
  std::optional<CanonicalRecord> recorded;
};

class Source {
 public:
  virtual ~Source() = default;
  // nullopt when exhausted.
  virtual std::optional<SourceItem> next() = 0;
};

// Streams a canonical JSONL file; every row becomes a frameless item.
class CanonicalFileSource : public Source {
 public:
  explicit CanonicalFileSource(const std::filesystem::path& path) : reader_(path) {}
  std::optional<SourceItem> next() override;

 private:
  CanonicalReader reader_;
};

class VectorSource : public Source {
 public:
  explicit VectorSource(std::vector<SourceItem> items) : items_(std::move(items)) {}
  std::optional<SourceItem> next() override;

 private:
  std::vector<SourceItem> items_;
  std::size_t pos_ = 0;
};

// Seconds of a simulated session, optionally with rendered frames. The scenario
// and session must outlive the source.
class SimulatorSource : public Source {
 public:
  SimulatorSource(const ScenarioSpec& spec, const SimulatedSession& session, bool with_frames);
  std::optional<SourceItem> next() override;

 private:
  const ScenarioSpec& spec_;
  const SimulatedSession& session_;
  std::optional<FrameSynth> synth_;
  int t_ = 0;
};

struct RawDetection {
  BoundingBox box;
  RoleConfidences roles;  // empty for non-person boxes
  // Replay keeps a recorded distribution as-is instead of re-attributing.
  std::optional<RoleDistribution> recorded_roles;
};

struct DetectorOutput {
  std::vector<RawDetection> objects;
  std::optional<MotionRecord> recorded_motion;
};

class DetectorPort {
 public:
  virtual ~DetectorPort() = default;
  // `frame` is null for frameless items. Throws AdapterError.
  virtual DetectorOutput detect(const SourceItem& item, const PreprocessedFrame* frame) = 0;
};

// Returns the recorded detection for exactly the requested session and ts.
// Uses the item's own record, else an index built from `records`.
class ReplayDetector : public DetectorPort {
 public:
  ReplayDetector() = default;
  explicit ReplayDetector(const std::vector<CanonicalRecord>& records);
  DetectorOutput detect(const SourceItem& item, const PreprocessedFrame* frame) override;

 private:
  std::map<std::pair<std::string, Timestamp>, CanonicalRecord> index_;
};

// Serves a simulated session's noisy detections as detector output, with each
// person's role reported as a single (role, confidence) pair.
class SyntheticDetector : public DetectorPort {
 public:
  SyntheticDetector(const ScenarioSpec& spec, const SimulatedSession& session) : spec_(spec), session_(session) {}
  DetectorOutput detect(const SourceItem& item, const PreprocessedFrame* frame) override;

 private:
  const ScenarioSpec& spec_;
  const SimulatedSession& session_;
};

}  // namespace ward
