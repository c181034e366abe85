#include "ward/logic.hpp"

#include "ward/errors.hpp"

namespace ward {

RoleAttribution attribute_role(const RoleConfidences& conf) {
  std::optional<Role> best;
  double best_conf = 0.0;
  for (Role role : kRoles) {
    const auto& c = conf.by_role[static_cast<std::size_t>(role)];
    if (!c) continue;
    if (!(*c >= 0.0 && *c <= 1.0)) throw Error(ErrorCode::MalformedRecord, "role confidence outside [0,1]");
    if (!best || *c > best_conf) {
      best = role;
      best_conf = *c;
    }
  }
  if (!best) return {RoleDistribution::uniform(), true};
  return {RoleDistribution::from_primary(*best, best_conf), false};
}

std::vector<RoleAttribution> attribute_roles(std::span<const RoleConfidences> persons) {
  std::vector<RoleAttribution> out;
  out.reserve(persons.size());
  for (const auto& p : persons) out.push_back(attribute_role(p));
  return out;
}

SmoothingWindow::SmoothingWindow(int window_s) : window_s_(window_s) {
  if (window_s < 1) throw Error(ErrorCode::InvalidArgument, "smoothing window must be >= 1 s");
}

void SmoothingWindow::push(const DetectionRecord& rec, std::optional<double> scene_motion) {
  if (!entries_.empty()) {
    if (rec.session_id != session_id_) {
      throw Error(ErrorCode::OutOfOrderRecord, "window for " + session_id_ + " got a record from " + rec.session_id);
    }
    if (rec.ts <= entries_.back().ts) {
      throw Error(ErrorCode::OutOfOrderRecord, rec.session_id + ": ts " + std::to_string(rec.ts) +
                                                   " not after " + std::to_string(entries_.back().ts));
    }
  }
  session_id_ = rec.session_id;
  entries_.push_back({rec.ts, rec.person_count(), rec.has_role(Role::patient), rec.has_role(Role::staff),
                      scene_motion});
  while (entries_.front().ts <= rec.ts - window_s_) entries_.pop_front();
}

SmoothingWindow update_window(SmoothingWindow w, const DetectionRecord& rec, const MotionRecord& motion) {
  w.push(rec, motion);
  return w;
}

LogicalState derive_state(const SmoothingWindow& w, const PipelineConfig& cfg) {
  if (w.empty()) throw Error(ErrorCode::EmptyWindow, "cannot derive a state from an empty window");
  long long persons = 0;
  bool any_patient = false;
  bool any_staff = false;
  double motion_sum = 0.0;
  int motion_n = 0;
  for (const auto& e : w.entries()) {
    persons += e.person_count;
    any_patient = any_patient || e.has_patient;
    any_staff = any_staff || e.has_staff;
    if (e.scene_motion) {
      motion_sum += *e.scene_motion;
      ++motion_n;
    }
  }
  const long long n = static_cast<long long>(w.size());
  LogicalState s;
  s.session_id = w.session_id();
  s.ts = w.entries().back().ts;
  // mean < 2 evaluated in integers
  s.person_alone = persons < 2 * n;
  s.patient_alone = s.person_alone && any_patient;
  s.supervised_by_staff = !s.person_alone && any_staff;
  s.moving = motion_n > 0 && motion_sum / motion_n > cfg.moving_threshold;
  s.smoothed_person_count = static_cast<double>(persons) / static_cast<double>(n);
  return s;
}

}  // namespace ward
