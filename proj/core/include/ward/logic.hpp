#pragma once

// Role attribution, the trailing smoothing window and the per-second logical
// states derived from it.

#include <array>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ward/config.hpp"
#include "ward/flow.hpp"
#include "ward/types.hpp"

namespace ward {

// Per-role confidences reported by the detector for one person box. Roles the
// detector did not score are left empty.
struct RoleConfidences {
  std::array<std::optional<double>, 3> by_role{};

  static RoleConfidences single(Role role, double confidence) {
    RoleConfidences rc;
    rc.by_role[static_cast<std::size_t>(role)] = confidence;
    return rc;
  }
  bool empty() const noexcept { return !by_role[0] && !by_role[1] && !by_role[2]; }
};

struct RoleAttribution {
  RoleDistribution distribution = RoleDistribution::uniform();
  // Set when the detector gave no role signal and the uniform fallback was used.
  bool no_role_signal = false;
};

// Highest confidence wins (ties: patient > staff > other) and keeps its score;
// the residual is split equally across the other two roles.
RoleAttribution attribute_role(const RoleConfidences& conf);
std::vector<RoleAttribution> attribute_roles(std::span<const RoleConfidences> persons);

struct LogicalState {
  std::string session_id;
  Timestamp ts = 0;
  bool person_alone = false;
  bool patient_alone = false;
  bool supervised_by_staff = false;
  bool moving = false;
  double smoothed_person_count = 0.0;

  bool operator==(const LogicalState&) const = default;
};

// Trailing time window (ts - window_s, ts] over one session's records.
class SmoothingWindow {
 public:
  struct Entry {
    Timestamp ts = 0;
    int person_count = 0;
    bool has_patient = false;
    bool has_staff = false;
    std::optional<double> scene_motion;
  };

  explicit SmoothingWindow(int window_s);

  // Appends and evicts entries that fell out of the window; a gap at least as
  // long as the window therefore restarts it. Throws OutOfOrderRecord unless
  // rec.ts is later than the newest entry.
  void push(const DetectionRecord& rec, std::optional<double> scene_motion);
  void push(const DetectionRecord& rec, const MotionRecord& motion) { push(rec, motion.scene); }

  int window_s() const noexcept { return window_s_; }
  const std::deque<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::string& session_id() const noexcept { return session_id_; }
  void clear() noexcept { entries_.clear(); }

 private:
  int window_s_;
  std::string session_id_;
  std::deque<Entry> entries_;
};

SmoothingWindow update_window(SmoothingWindow w, const DetectionRecord& rec, const MotionRecord& motion);

// Throws EmptyWindow.
LogicalState derive_state(const SmoothingWindow& w, const PipelineConfig& cfg);

}  // namespace ward
