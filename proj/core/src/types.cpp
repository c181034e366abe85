#include "ward/types.hpp"

#include <cmath>

#include "ward/errors.hpp"

namespace ward {

Frame::Frame(std::string session_id, Timestamp ts, int width, int height, FrameMode mode,
             std::vector<std::uint8_t> pixels)
    : session_id_(std::move(session_id)),
      ts_(ts),
      width_(width),
      height_(height),
      mode_(mode),
      pixels_(std::move(pixels)) {
  if (width_ < 1 || height_ < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive");
  }
  const auto expected = static_cast<std::size_t>(width_) * height_ * channel_count(mode_);
  if (pixels_.size() != expected) {
    throw Error(ErrorCode::InvalidArgument,
                "frame buffer has " + std::to_string(pixels_.size()) + " bytes, expected " +
                    std::to_string(expected));
  }
}

std::string_view to_string(ObjectClass cls) noexcept {
  switch (cls) {
    case ObjectClass::person: return "person";
    case ObjectClass::bed: return "bed";
    case ObjectClass::chair: return "chair";
  }
  return "person";
}

std::optional<ObjectClass> parse_object_class(std::string_view name) noexcept {
  for (auto cls : kObjectClasses) {
    if (to_string(cls) == name) return cls;
  }
  return std::nullopt;
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::patient: return "patient";
    case Role::staff: return "staff";
    case Role::other: return "other";
  }
  return "other";
}

std::optional<Role> parse_role(std::string_view name) noexcept {
  for (auto role : kRoles) {
    if (to_string(role) == name) return role;
  }
  return std::nullopt;
}

RoleDistribution RoleDistribution::from_scores(double patient, double staff, double other) {
  const std::array<double, 3> s{patient, staff, other};
  for (double v : s) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::MalformedRecord, "role score outside [0,1]");
    }
  }
  if (std::abs(patient + staff + other - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::MalformedRecord, "role scores do not sum to 1");
  }
  return RoleDistribution(s);
}

RoleDistribution RoleDistribution::from_primary(Role primary, double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(ErrorCode::MalformedRecord, "role confidence outside [0,1]");
  }
  const double residual = (1.0 - confidence) / 2.0;
  std::array<double, 3> s{residual, residual, residual};
  s[static_cast<std::size_t>(primary)] = confidence;
  return RoleDistribution(s);
}

RoleDistribution RoleDistribution::uniform() noexcept {
  return RoleDistribution({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

Role RoleDistribution::argmax() const noexcept {
  // Strict comparison keeps the earliest role on ties.
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores_.size(); ++i) {
    if (scores_[i] > scores_[best]) best = i;
  }
  return static_cast<Role>(best);
}

int DetectionRecord::person_count() const noexcept {
  int n = 0;
  for (const auto& b : boxes) n += b.cls == ObjectClass::person ? 1 : 0;
  return n;
}

bool DetectionRecord::has_role(Role role) const noexcept {
  for (std::size_t i = 0; i < boxes.size() && i < roles.size(); ++i) {
    if (boxes[i].cls == ObjectClass::person && roles[i] && roles[i]->argmax() == role) return true;
  }
  return false;
}

std::optional<HospitalSize> parse_hospital_size(std::string_view name) noexcept {
  if (name == "small") return HospitalSize::small;
  if (name == "medium") return HospitalSize::medium;
  if (name == "large") return HospitalSize::large;
  return std::nullopt;
}

void validate_session_meta(const SessionMeta& meta) {
  if (meta.end_ts <= meta.start_ts) {
    throw Error(ErrorCode::MalformedRecord, "session " + meta.session_id + " ends before it starts");
  }
}

bool meets_minimum_duration(const SessionMeta& meta, double min_days) noexcept {
  return meta.end_ts > meta.start_ts && meta.monitored_days() >= min_days;
}

}  // namespace ward
