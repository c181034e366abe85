#pragma once

#include "ward/config.hpp"
#include "ward/image.hpp"
#include "ward/types.hpp"

namespace ward {

inline constexpr int kMinInputSide = 64;

struct PreprocessedFrame {
  Frame analysis;  // bilinear, cfg.analysis_dims
  Frame detector;  // bicubic, cfg.detector_dims, no letterboxing
  GrayImage flow;  // bilinear gray, cfg.flow_dims
};

// Throws TooSmallInput when either side is below 64 px.
PreprocessedFrame preprocess(const Frame& frame, const PipelineConfig& cfg);

}  // namespace ward
