#include "ward/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ward/errors.hpp"

namespace ward {

using nlohmann::json;

namespace {

Polygon polygon_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "safety zone " + key + " must be a list of [x, y] pairs");
  std::vector<Point> pts;
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw Error(ErrorCode::InvalidConfig, "safety zone " + key + " has a malformed vertex");
    }
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  try {
    return Polygon(std::move(pts));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, "safety zone " + key + ": " + e.what());
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidConfig, std::string("bad value for ") + key);
    }
  }
}

Dims read_dims(const json& j, const char* key, Dims fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->size() != 2) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be [w, h]");
  return {(*it)[0].get<int>(), (*it)[1].get<int>()};
}

}  // namespace

void PipelineConfig::validate() const {
  if (smoothing_window_s < 1) throw Error(ErrorCode::InvalidConfig, "smoothing_window_s must be >= 1");
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) throw Error(ErrorCode::InvalidConfig, "iou_threshold must be in (0,1)");
  if (!(safety_zone_expansion >= 0.0)) throw Error(ErrorCode::InvalidConfig, "safety_zone_expansion must be >= 0");
  if (!(moving_threshold >= 0.0)) throw Error(ErrorCode::InvalidConfig, "moving_threshold must be >= 0");
  if (day_start_hour < 0 || day_start_hour > 23 || night_start_hour < 0 || night_start_hour > 23 ||
      day_start_hour == night_start_hour) {
    throw Error(ErrorCode::InvalidConfig, "day/night boundaries must be distinct hours in 0..23");
  }
  if (!(crossing_gate > 0.0)) throw Error(ErrorCode::InvalidConfig, "crossing_gate must be positive");
  for (const Dims& d : {analysis_dims, detector_dims, flow_dims}) {
    if (d.width < 1 || d.height < 1) throw Error(ErrorCode::InvalidConfig, "resolutions must be positive");
  }
  flow.validate();
}

const Polygon* PipelineConfig::zone_for(std::string_view session_id) const {
  if (auto it = safety_zones.find(session_id); it != safety_zones.end()) return &it->second;
  if (auto it = safety_zones.find("*"); it != safety_zones.end()) return &it->second;
  return nullptr;
}

PipelineConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");

  static const std::set<std::string> known{
      "smoothing_window_s", "moving_threshold", "iou_threshold", "day_start_hour", "night_start_hour",
      "safety_zone_expansion", "flow", "motion_aggregation", "utc_offset_s", "crossing_gate",
      "enable_flow", "exclude_exception_frames", "analysis_dims", "detector_dims", "flow_dims",
      "safety_zones", "schema_version"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + k + "'");
  }

  PipelineConfig cfg;
  read(j, "smoothing_window_s", cfg.smoothing_window_s);
  read(j, "moving_threshold", cfg.moving_threshold);
  read(j, "iou_threshold", cfg.iou_threshold);
  read(j, "day_start_hour", cfg.day_start_hour);
  read(j, "night_start_hour", cfg.night_start_hour);
  read(j, "safety_zone_expansion", cfg.safety_zone_expansion);
  read(j, "utc_offset_s", cfg.utc_offset_s);
  read(j, "crossing_gate", cfg.crossing_gate);
  read(j, "enable_flow", cfg.enable_flow);
  read(j, "exclude_exception_frames", cfg.exclude_exception_frames);
  cfg.analysis_dims = read_dims(j, "analysis_dims", cfg.analysis_dims);
  cfg.detector_dims = read_dims(j, "detector_dims", cfg.detector_dims);
  cfg.flow_dims = read_dims(j, "flow_dims", cfg.flow_dims);

  if (auto it = j.find("motion_aggregation"); it != j.end()) {
    const auto s = it->get<std::string>();
    if (s == "mean_magnitude") cfg.motion_aggregation = MotionAggregation::mean_magnitude;
    else if (s == "magnitude_of_mean") cfg.motion_aggregation = MotionAggregation::magnitude_of_mean;
    else throw Error(ErrorCode::InvalidConfig, "motion_aggregation must be mean_magnitude or magnitude_of_mean");
  }
  if (auto it = j.find("flow"); it != j.end()) {
    read(*it, "pyr_scale", cfg.flow.pyr_scale);
    read(*it, "levels", cfg.flow.levels);
    read(*it, "winsize", cfg.flow.winsize);
    read(*it, "iterations", cfg.flow.iterations);
    read(*it, "poly_n", cfg.flow.poly_n);
    read(*it, "poly_sigma", cfg.flow.poly_sigma);
  }
  if (auto it = j.find("safety_zones"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::InvalidConfig, "safety_zones must map session ids to polygons");
    for (const auto& [k, v] : it->items()) cfg.safety_zones.emplace(k, polygon_from_json(v, k));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["smoothing_window_s"] = cfg.smoothing_window_s;
  j["moving_threshold"] = cfg.moving_threshold;
  j["iou_threshold"] = cfg.iou_threshold;
  j["day_start_hour"] = cfg.day_start_hour;
  j["night_start_hour"] = cfg.night_start_hour;
  j["safety_zone_expansion"] = cfg.safety_zone_expansion;
  j["utc_offset_s"] = cfg.utc_offset_s;
  j["crossing_gate"] = cfg.crossing_gate;
  j["enable_flow"] = cfg.enable_flow;
  j["exclude_exception_frames"] = cfg.exclude_exception_frames;
  j["motion_aggregation"] =
      cfg.motion_aggregation == MotionAggregation::mean_magnitude ? "mean_magnitude" : "magnitude_of_mean";
  j["analysis_dims"] = {cfg.analysis_dims.width, cfg.analysis_dims.height};
  j["detector_dims"] = {cfg.detector_dims.width, cfg.detector_dims.height};
  j["flow_dims"] = {cfg.flow_dims.width, cfg.flow_dims.height};
  j["flow"] = {{"pyr_scale", cfg.flow.pyr_scale}, {"levels", cfg.flow.levels},
               {"winsize", cfg.flow.winsize},     {"iterations", cfg.flow.iterations},
               {"poly_n", cfg.flow.poly_n},       {"poly_sigma", cfg.flow.poly_sigma}};
  json zones = json::object();
  for (const auto& [k, p] : cfg.safety_zones) {
    json pts = json::array();
    for (const auto& v : p.vertices()) pts.push_back({v.x, v.y});
    zones[k] = pts;
  }
  j["safety_zones"] = zones;
  return j.dump(2);
}

}  // namespace ward
