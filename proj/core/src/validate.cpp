#include "ward/validate.hpp"

#include <algorithm>
#include <cmath>

#include "ward/errors.hpp"

namespace ward {

namespace {

std::string where(const DetectionRecord& rec, std::size_t i) {
  return rec.session_id + "@" + std::to_string(rec.ts) + " box " + std::to_string(i);
}

}  // namespace

DetectionRecord validate_record(const DetectionRecord& rec, Dims frame_dims) {
  if (frame_dims.width < 1 || frame_dims.height < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive");
  }
  if (rec.roles.size() != rec.boxes.size()) {
    throw Error(ErrorCode::MalformedRecord,
                rec.session_id + "@" + std::to_string(rec.ts) + ": " +
                    std::to_string(rec.roles.size()) + " role entries for " +
                    std::to_string(rec.boxes.size()) + " boxes");
  }

  DetectionRecord out;
  out.session_id = rec.session_id;
  out.ts = rec.ts;
  out.boxes.reserve(rec.boxes.size());
  out.roles.reserve(rec.roles.size());

  const double W = frame_dims.width;
  const double H = frame_dims.height;
  for (std::size_t i = 0; i < rec.boxes.size(); ++i) {
    const BoundingBox& b = rec.boxes[i];
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
      throw Error(ErrorCode::MalformedRecord, where(rec, i) + ": non-finite coordinates");
    }
    if (!(b.w > 0.0 && b.h > 0.0)) {
      throw Error(ErrorCode::MalformedRecord, where(rec, i) + ": non-positive size");
    }
    if (!(b.confidence >= 0.0 && b.confidence <= 1.0)) {
      throw Error(ErrorCode::MalformedRecord, where(rec, i) + ": confidence outside [0,1]");
    }
    const double x0 = std::clamp(b.x, 0.0, W);
    const double y0 = std::clamp(b.y, 0.0, H);
    const double x1 = std::clamp(b.x + b.w, 0.0, W);
    const double y1 = std::clamp(b.y + b.h, 0.0, H);
    if (!(x1 > x0 && y1 > y0)) {
      throw Error(ErrorCode::MalformedRecord, where(rec, i) + ": box lies outside the frame");
    }
    const bool is_person = b.cls == ObjectClass::person;
    if (is_person != rec.roles[i].has_value()) {
      throw Error(ErrorCode::MalformedRecord,
                  where(rec, i) + (is_person ? ": person box without role distribution"
                                             : ": role distribution on a non-person box"));
    }
    out.boxes.push_back({b.cls, x0, y0, x1 - x0, y1 - y0, b.confidence});
    out.roles.push_back(rec.roles[i]);
  }
  return out;
}

DetectionRecord RecordValidator::validate(const DetectionRecord& rec) {
  auto it = last_ts_.find(rec.session_id);
  if (it != last_ts_.end() && rec.ts <= it->second) {
    throw Error(ErrorCode::NonMonotonicTimestamp,
                rec.session_id + ": ts " + std::to_string(rec.ts) + " does not follow " +
                    std::to_string(it->second));
  }
  DetectionRecord out = validate_record(rec, dims_);
  last_ts_[rec.session_id] = rec.ts;
  return out;
}

}  // namespace ward
