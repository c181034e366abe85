#pragma once

#include <map>
#include <string>

#include "ward/types.hpp"

namespace ward {

// Clamps boxes into the frame and enforces the record invariants.
// Throws MalformedRecord when a box is degenerate or falls outside the frame,
// a confidence is outside [0,1], or the role list does not line up with the
// person boxes.
DetectionRecord validate_record(const DetectionRecord& rec, Dims frame_dims);

// Adds per-session timestamp monotonicity on top of validate_record.
class RecordValidator {
 public:
  explicit RecordValidator(Dims frame_dims) : dims_(frame_dims) {}

  // Throws NonMonotonicTimestamp if rec.ts does not advance its session.
  DetectionRecord validate(const DetectionRecord& rec);

  void reset() { last_ts_.clear(); }

 private:
  Dims dims_;
  std::map<std::string, Timestamp, std::less<>> last_ts_;
};

}  // namespace ward
