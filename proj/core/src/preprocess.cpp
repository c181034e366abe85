#include "ward/preprocess.hpp"

#include "ward/errors.hpp"

namespace ward {

PreprocessedFrame preprocess(const Frame& frame, const PipelineConfig& cfg) {
  if (frame.width() < kMinInputSide || frame.height() < kMinInputSide) {
    throw Error(ErrorCode::TooSmallInput, "frame " + std::to_string(frame.width()) + "x" +
                                              std::to_string(frame.height()) + " is below 64 px");
  }
  return {resize_frame(frame, cfg.analysis_dims, Interpolation::bilinear),
          resize_frame(frame, cfg.detector_dims, Interpolation::bicubic),
          to_grayscale_downsampled(frame, cfg.flow_dims)};
}

}  // namespace ward
