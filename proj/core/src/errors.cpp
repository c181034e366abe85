#include "ward/errors.hpp"

namespace ward {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::WrongClass: return "WrongClass";
    case ErrorCode::ZoneDimensionMismatch: return "ZoneDimensionMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::OutOfOrderRecord: return "OutOfOrderRecord";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
    case ErrorCode::IntervalOutOfBounds: return "IntervalOutOfBounds";
    case ErrorCode::OverlappingIntervals: return "OverlappingIntervals";
    case ErrorCode::MisalignedFrames: return "MisalignedFrames";
    case ErrorCode::SingleClassTarget: return "SingleClassTarget";
    case ErrorCode::EmptyPeriod: return "EmptyPeriod";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::TooSmallInput: return "TooSmallInput";
    case ErrorCode::UnknownAdapter: return "UnknownAdapter";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::AdapterError: return "AdapterError";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace ward
