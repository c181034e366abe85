#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ward {

enum class ErrorCode {
  // record and input validation
  MalformedRecord,
  NonMonotonicTimestamp,
  InvalidArgument,
  InvalidConfig,
  // geometry
  DegeneratePolygon,
  WrongClass,
  ZoneDimensionMismatch,
  // flow
  DimensionMismatch,
  EmptyMask,
  // logic / trends
  OutOfOrderRecord,
  EmptyWindow,
  UnsortedInput,
  IntervalOutOfBounds,
  OverlappingIntervals,
  // evaluation
  MisalignedFrames,
  SingleClassTarget,
  EmptyPeriod,
  NoOverlap,
  // simulator / io
  InvalidSchedule,
  TooSmallInput,
  UnknownAdapter,
  SchemaMismatch,
  AdapterError,
  StoreCorrupt,
  // internal
  NonConvergence,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every error raised by the library carries a code so callers (and the CLI's
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for errors caused by bad input rather than an internal failure.
  bool is_validation() const noexcept {
    return code_ != ErrorCode::NonConvergence && code_ != ErrorCode::Io;
  }

 private:
  ErrorCode code_;
};

}  // namespace ward
