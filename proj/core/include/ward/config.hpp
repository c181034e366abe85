#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "ward/flow.hpp"
#include "ward/geometry.hpp"

namespace ward {

struct PipelineConfig {
  int smoothing_window_s = 5;
  // Mean scene flow magnitude (px/frame at flow resolution) above which the
  // window counts as moving.
  double moving_threshold = 0.5;
  double iou_threshold = 0.5;
  int day_start_hour = 6;
  int night_start_hour = 21;
  double safety_zone_expansion = 0.10;
  FlowParams flow;
  MotionAggregation motion_aggregation = MotionAggregation::mean_magnitude;
  // Applied before bucketing timestamps into calendar dates and hours.
  int utc_offset_s = 0;
  double crossing_gate = kDefaultCrossingGate;
  // When false, motion comes only from records that already carry it.
  bool enable_flow = true;
  bool exclude_exception_frames = true;

  Dims analysis_dims{1088, 612};
  Dims detector_dims{608, 608};
  Dims flow_dims = kFlowDims;

  // Safety-zone polygons in analysis-frame pixels, keyed by session id.
  // The key "*" applies to sessions without their own entry.
  std::map<std::string, Polygon, std::less<>> safety_zones;

  // Throws InvalidConfig.
  void validate() const;
  const Polygon* zone_for(std::string_view session_id) const;
};

// Reads a JSON config. Unknown keys are rejected so typos surface early.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view json_text);
std::string config_to_json(const PipelineConfig& cfg);

}  // namespace ward
