#include "ward/detector.hpp"

#include "ward/errors.hpp"

namespace ward {

namespace {

DetectorOutput from_record(const CanonicalRecord& rec, bool keep_distribution) {
  DetectorOutput out;
  const auto& d = rec.detection;
  for (std::size_t i = 0; i < d.boxes.size(); ++i) {
    RawDetection r{d.boxes[i], {}, std::nullopt};
    if (i < d.roles.size() && d.roles[i]) {
      if (keep_distribution) {
        r.recorded_roles = d.roles[i];
      } else {
        const Role top = d.roles[i]->argmax();
        r.roles = RoleConfidences::single(top, d.roles[i]->score(top));
      }
    }
    out.objects.push_back(std::move(r));
  }
  out.recorded_motion = rec.motion;
  return out;
}

}  // namespace

std::optional<SourceItem> CanonicalFileSource::next() {
  auto rec = reader_.next();
  if (!rec) return std::nullopt;
  SourceItem item{rec->detection.session_id, rec->detection.ts, std::nullopt, std::nullopt};
  item.recorded = std::move(*rec);
  return item;
}

std::optional<SourceItem> VectorSource::next() {
  if (pos_ >= items_.size()) return std::nullopt;
  return items_[pos_++];
}

SimulatorSource::SimulatorSource(const ScenarioSpec& spec, const SimulatedSession& session, bool with_frames)
    : spec_(spec), session_(session) {
  if (with_frames) synth_.emplace(spec);
}

std::optional<SourceItem> SimulatorSource::next() {
  if (t_ >= spec_.duration_s) return std::nullopt;
  SourceItem item{spec_.session_id, spec_.start_ts + t_, std::nullopt, std::nullopt};
  if (synth_) item.frame = synth_->render(t_);
  ++t_;
  return item;
}

ReplayDetector::ReplayDetector(const std::vector<CanonicalRecord>& records) {
  for (const auto& r : records) index_[{r.detection.session_id, r.detection.ts}] = r;
}

DetectorOutput ReplayDetector::detect(const SourceItem& item, const PreprocessedFrame*) {
  if (item.recorded) {
    const auto& d = item.recorded->detection;
    if (d.session_id != item.session_id || d.ts != item.ts) {
      throw Error(ErrorCode::AdapterError, "recorded detection does not match " + item.session_id + "@" +
                                               std::to_string(item.ts));
    }
    return from_record(*item.recorded, true);
  }
  auto it = index_.find({item.session_id, item.ts});
  if (it == index_.end()) {
    throw Error(ErrorCode::AdapterError, "no recorded detection for " + item.session_id + "@" + std::to_string(item.ts));
  }
  return from_record(it->second, true);
}

DetectorOutput SyntheticDetector::detect(const SourceItem& item, const PreprocessedFrame*) {
  const Timestamp t = item.ts - spec_.start_ts;
  if (item.session_id != spec_.session_id || t < 0 || t >= static_cast<Timestamp>(session_.detections.size())) {
    throw Error(ErrorCode::AdapterError, "synthetic session has no second " + item.session_id + "@" +
                                             std::to_string(item.ts));
  }
  return from_record(session_.detections[static_cast<std::size_t>(t)], false);
}

}  // namespace ward
