#include "ward/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "ward/csv.hpp"
#include "ward/errors.hpp"
#include "ward/preprocess.hpp"

namespace ward {

SessionPipeline::SessionPipeline(std::string session_id, const PipelineConfig& cfg)
    : session_id_(std::move(session_id)), cfg_(cfg), validator_(cfg.analysis_dims), window_(cfg.smoothing_window_s) {
  if (const Polygon* zone = cfg.zone_for(session_id_)) {
    const Polygon expanded = expand_polygon(*zone, cfg.safety_zone_expansion);
    zone_analysis_ = rasterize(expanded, cfg.analysis_dims.width, cfg.analysis_dims.height, RoiKind::safety_zone);
    const double sx = static_cast<double>(cfg.flow_dims.width) / cfg.analysis_dims.width;
    const double sy = static_cast<double>(cfg.flow_dims.height) / cfg.analysis_dims.height;
    zone_flow_ = rasterize(scale_coordinates(expanded, sx, sy), cfg.flow_dims.width, cfg.flow_dims.height,
                           RoiKind::safety_zone);
  }
}

DetectionRecord SessionPipeline::to_record(const SourceItem& item, const DetectorOutput& out) const {
  DetectionRecord rec{item.session_id, item.ts, {}, {}};
  for (const auto& obj : out.objects) {
    rec.boxes.push_back(obj.box);
    if (obj.box.cls != ObjectClass::person) {
      rec.roles.emplace_back(std::nullopt);
    } else if (obj.recorded_roles) {
      rec.roles.push_back(*obj.recorded_roles);
    } else {
      rec.roles.push_back(attribute_role(obj.roles).distribution);
    }
  }
  return rec;
}

CanonicalRecord SessionPipeline::step(const SourceItem& item, DetectorPort& detector,
                                      std::vector<CrossingEvent>* crossings) {
  if (item.session_id != session_id_) {
    throw Error(ErrorCode::InvalidArgument, "pipeline for " + session_id_ + " got " + item.session_id);
  }
  std::optional<PreprocessedFrame> pre;
  if (item.frame) pre = preprocess(*item.frame, cfg_);

  DetectorOutput out;
  try {
    out = detector.detect(item, pre ? &*pre : nullptr);
  } catch (const Error& e) {
    throw Error(ErrorCode::AdapterError, item.session_id + "@" + std::to_string(item.ts) + ": " + e.what());
  }
  const DetectionRecord det = validator_.validate(to_record(item, out));

  const bool contiguous = prev_ts_ && *prev_ts_ == item.ts - 1;
  if (!contiguous) {
    prev_gray_.reset();
    prev_det_.reset();
  }

  MotionRecord motion{item.session_id, item.ts, std::nullopt, std::nullopt, std::nullopt};
  if (pre && cfg_.enable_flow) {
    if (prev_gray_) {
      const FlowField flow = farneback_flow(*prev_gray_, pre->flow, cfg_.flow);
      motion.scene = roi_motion(flow, RoiMask::full(RoiKind::scene, flow.width, flow.height), cfg_.motion_aggregation);
      if (auto bed = bed_roi_from_detection(det, cfg_.analysis_dims, cfg_.flow_dims); bed && !bed->empty()) {
        motion.bed = roi_motion(flow, *bed, cfg_.motion_aggregation);
      }
      if (zone_flow_ && !zone_flow_->empty()) motion.safety_zone = roi_motion(flow, *zone_flow_, cfg_.motion_aggregation);
    }
    prev_gray_ = std::move(pre->flow);
  } else if (out.recorded_motion) {
    motion.scene = out.recorded_motion->scene;
    motion.bed = out.recorded_motion->bed;
    motion.safety_zone = out.recorded_motion->safety_zone;
  }

  window_.push(det, motion);
  const LogicalState state = derive_state(window_, cfg_);

  if (zone_analysis_ && prev_det_ && crossings) {
    auto ev = detect_crossings(*prev_det_, det, *zone_analysis_, cfg_.crossing_gate);
    crossings->insert(crossings->end(), ev.begin(), ev.end());
  }
  prev_det_ = det;
  prev_ts_ = item.ts;

  CanonicalRecord rec{det, std::nullopt, state};
  if (motion.scene || motion.bed || motion.safety_zone) rec.motion = motion;
  return rec;
}

namespace {

void sort_crossings(std::vector<CrossingEvent>& ev) {
  std::stable_sort(ev.begin(), ev.end(), [](const CrossingEvent& a, const CrossingEvent& b) {
    return std::tie(a.session_id, a.ts, a.person_index) < std::tie(b.session_id, b.ts, b.person_index);
  });
}

}  // namespace

RunSummary run_pipeline(Source& source, DetectorPort& detector, const PipelineConfig& cfg, RecordSink& sink) {
  RunSummary summary;
  std::map<std::string, std::unique_ptr<SessionPipeline>> sessions;
  while (auto item = source.next()) {
    auto& p = sessions[item->session_id];
    if (!p) p = std::make_unique<SessionPipeline>(item->session_id, cfg);
    sink.append(p->step(*item, detector, &summary.crossings));
    ++summary.records;
  }
  summary.sessions = sessions.size();
  sort_crossings(summary.crossings);
  return summary;
}

RunSummary run_sessions_parallel(std::vector<SessionJob> jobs, const PipelineConfig& cfg, RecordSink& sink,
                                 unsigned threads) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  std::vector<RunSummary> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_pipeline(*jobs[i].source, *jobs[i].detector, cfg, sink);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunSummary total;
  for (auto& r : results) {
    total.records += r.records;
    total.sessions += r.sessions;
    total.crossings.insert(total.crossings.end(), r.crossings.begin(), r.crossings.end());
  }
  sort_crossings(total.crossings);
  return total;
}

void write_crossings_csv(std::ostream& out, const std::vector<CrossingEvent>& events) {
  csv::Writer w(out, "crossings", {"session_id", "ts", "direction", "person_index"});
  for (const auto& e : events) {
    w.row({e.session_id, std::to_string(e.ts), std::string(to_string(e.direction)), std::to_string(e.person_index)});
  }
}

}  // namespace ward
