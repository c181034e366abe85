#pragma once

// Shared domain vocabulary: frames, detections, roles and session metadata.
// Everything here is a value type; once built, instances are never mutated by
// the library and can be shared freely across threads.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ward {

// Whole seconds since the Unix epoch (UTC). The capture cadence is 1 fps.
using Timestamp = std::int64_t;

struct Dims {
  int width = 0;
  int height = 0;

  bool operator==(const Dims&) const = default;
};

enum class FrameMode { RGB, NIR };

constexpr int channel_count(FrameMode mode) noexcept { return mode == FrameMode::RGB ? 3 : 1; }

// Row-major, interleaved 8-bit image tagged with its session and capture time.
class Frame {
 public:
  Frame(std::string session_id, Timestamp ts, int width, int height, FrameMode mode,
        std::vector<std::uint8_t> pixels);

  const std::string& session_id() const noexcept { return session_id_; }
  Timestamp ts() const noexcept { return ts_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Dims dims() const noexcept { return {width_, height_}; }
  FrameMode mode() const noexcept { return mode_; }
  int channels() const noexcept { return channel_count(mode_); }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c = 0) const noexcept {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels() + c];
  }

 private:
  std::string session_id_;
  Timestamp ts_;
  int width_;
  int height_;
  FrameMode mode_;
  std::vector<std::uint8_t> pixels_;
};

enum class ObjectClass { person, bed, chair };
inline constexpr std::array<ObjectClass, 3> kObjectClasses{ObjectClass::person, ObjectClass::bed,
                                                           ObjectClass::chair};

std::string_view to_string(ObjectClass cls) noexcept;
std::optional<ObjectClass> parse_object_class(std::string_view name) noexcept;

struct BoundingBox {
  ObjectClass cls = ObjectClass::person;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 1.0;

  double area() const noexcept { return w * h; }
  bool operator==(const BoundingBox&) const = default;
};

// Declaration order is the tie-break order: patient > staff > other.
enum class Role { patient = 0, staff = 1, other = 2 };
inline constexpr std::array<Role, 3> kRoles{Role::patient, Role::staff, Role::other};

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

// Role scores for one detected person. Always sums to 1 within 1e-9.
class RoleDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Throws MalformedRecord when a score is outside [0,1] or the sum is off.
  static RoleDistribution from_scores(double patient, double staff, double other);
  // Primary role gets `confidence`; the residual is split equally between the
  // two remaining roles.
  static RoleDistribution from_primary(Role primary, double confidence);
  static RoleDistribution uniform() noexcept;

  double score(Role role) const noexcept { return scores_[static_cast<std::size_t>(role)]; }
  Role argmax() const noexcept;

  bool operator==(const RoleDistribution&) const = default;

 private:
  explicit RoleDistribution(std::array<double, 3> scores) noexcept : scores_(scores) {}
  std::array<double, 3> scores_;
};

// One second of detector output for one session.
struct DetectionRecord {
  std::string session_id;
  Timestamp ts = 0;
  std::vector<BoundingBox> boxes;
  // Parallel to `boxes`; engaged exactly for person boxes.
  std::vector<std::optional<RoleDistribution>> roles;

  int person_count() const noexcept;
  // True when some person box has `role` as its argmax role.
  bool has_role(Role role) const noexcept;

  bool operator==(const DetectionRecord&) const = default;
};

enum class HospitalSize { small, medium, large };

struct SessionMeta {
  std::string session_id;
  std::string hospital_id;
  HospitalSize hospital_size_bucket = HospitalSize::medium;
  std::string age_bucket;
  std::string gender;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;

  double monitored_days() const noexcept { return static_cast<double>(end_ts - start_ts) / 86400.0; }
};

std::optional<HospitalSize> parse_hospital_size(std::string_view name) noexcept;

// Throws MalformedRecord unless end_ts > start_ts.
void validate_session_meta(const SessionMeta& meta);
// Public-dataset inclusion rule: sessions shorter than `min_days` are dropped.
bool meets_minimum_duration(const SessionMeta& meta, double min_days = 2.0) noexcept;

}  // namespace ward
