#pragma once

// Seeded synthetic monitoring sessions with schedule-side ground truth.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ward/geometry.hpp"
#include "ward/logic.hpp"
#include "ward/record_io.hpp"
#include "ward/trends.hpp"

namespace ward {

struct OccupantSpec {
  std::string id;  // identity across intervals; generated when empty
  Role role = Role::patient;
  BoundingBox box;      // person box at the interval start, frame_dims pixels
  Point velocity;       // px per second
};

struct IntervalSpec {
  Timestamp start = 0;  // seconds from session start, half-open
  Timestamp end = 0;
  std::vector<OccupantSpec> occupants;
  // Drift speed of the textured patch, px per frame at render resolution.
  double motion_speed = 0.0;
};

struct NoiseSpec {
  double p_miss = 0.0;  // drop each true person
  double p_spur = 0.0;  // add one spurious person per second
  double p_role = 0.0;  // swap a person's role
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::string session_id = "sim";
  Timestamp start_ts = 0;
  int duration_s = 0;
  Dims frame_dims{1088, 612};  // detection coordinate space
  Dims render_dims{480, 270};  // synthesized frames
  std::optional<Polygon> zone;
  double zone_expansion = 0.10;
  NoiseSpec noise;
  double moving_threshold = 0.5;
  std::optional<BoundingBox> bed;
  // Normalized [x, y, w, h] of the drifting texture patch.
  BoundingBox motion_patch{ObjectClass::person, 0.25, 0.25, 0.5, 0.5, 1.0};
  double role_confidence = 0.9;

  std::vector<IntervalSpec> schedule;

  // Throws InvalidSchedule.
  void validate() const;
  // Scene motion expected from flow: speed times the patch area fraction.
  double expected_scene_motion(double speed) const noexcept;
};

// Counts-by-role occupants may be given instead of explicit boxes; they are
// laid out side by side. Throws InvalidSchedule / InvalidConfig.
ScenarioSpec parse_scenario(std::string_view json_text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct SimulatedSession {
  // Noisy detector output, with the expected scene motion attached.
  std::vector<CanonicalRecord> detections;
  // Noise-free boxes with unsmoothed schedule states.
  std::vector<CanonicalRecord> truth;
  ObservationLog log;  // patient-alone runs of the truth
  std::vector<CrossingEvent> crossings;
};

SimulatedSession generate(const ScenarioSpec& spec);

// The safety-zone mask (expanded) at the detection resolution, if any zone.
std::optional<RoiMask> scenario_zone_mask(const ScenarioSpec& spec);

// Renders frames with a static textured background and a patch whose texture
// drifts horizontally at the scheduled speed.
class FrameSynth {
 public:
  explicit FrameSynth(const ScenarioSpec& spec);

  // Frame at offset t (0 <= t < duration_s), single-channel NIR.
  Frame render(int t) const;
  double patch_offset(int t) const { return offsets_.at(static_cast<std::size_t>(t)); }

 private:
  const ScenarioSpec& spec_;
  std::vector<double> offsets_;
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> background_;
  std::vector<Wave> patch_;
};

}  // namespace ward
