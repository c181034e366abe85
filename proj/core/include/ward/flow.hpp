#pragma once

// Dense optical flow (Farneback polynomial-expansion method) and per-ROI
// motion aggregation.

#include <optional>
#include <string>
#include <vector>

#include "ward/geometry.hpp"
#include "ward/image.hpp"

namespace ward {

struct FlowParams {
  double pyr_scale = 0.5;
  int levels = 3;  // pyramid levels including full resolution
  int winsize = 15;
  int iterations = 3;
  int poly_n = 5;
  double poly_sigma = 1.2;

  // Throws InvalidConfig.
  void validate() const;
  bool operator==(const FlowParams&) const = default;
};

// Smallest pyramid level side; coarser levels are dropped.
inline constexpr int kMinPyramidSide = 16;

// Local quadratic model f(x, y) = c + bx*x + by*y + axx*x^2 + ayy*y^2 + axy*x*y
// with (x, y) offsets in pixels from the pixel centre, y pointing down.
struct QuadCoeffs {
  float c = 0, bx = 0, by = 0, axx = 0, ayy = 0, axy = 0;
};

struct PolyExpansion {
  int width = 0;
  int height = 0;
  std::vector<QuadCoeffs> coeffs;

  const QuadCoeffs& at(int x, int y) const noexcept {
    return coeffs[static_cast<std::size_t>(y) * width + x];
  }
};

// Gaussian-weighted (sigma) least-squares fit over the poly_n x poly_n
// neighbourhood of every pixel; borders replicate.
PolyExpansion polynomial_expansion(const GrayImage& gray, int poly_n, double poly_sigma);

struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> dx;
  std::vector<float> dy;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h), dx(static_cast<std::size_t>(w) * h, 0.0f), dy(static_cast<std::size_t>(w) * h, 0.0f) {}
  Dims dims() const noexcept { return {width, height}; }
};

struct FlowTimings {
  double pyramid_ms = 0.0;
  double expansion_ms = 0.0;
  double solve_ms = 0.0;
  double total_ms = 0.0;
};

// Displacement from prev to cur (cur(p + d) ~ prev(p)) at prev's resolution.
// Throws DimensionMismatch for differently sized inputs.
FlowField farneback_flow(const GrayImage& prev, const GrayImage& cur, const FlowParams& params,
                         FlowTimings* timings = nullptr);

enum class MotionAggregation {
  mean_magnitude,     // mean over pixels of |(dx, dy)|
  magnitude_of_mean,  // |mean (dx, dy)|
};

// Throws EmptyMask / DimensionMismatch.
double roi_motion(const FlowField& flow, const RoiMask& mask,
                  MotionAggregation agg = MotionAggregation::mean_magnitude);

struct MotionRecord {
  std::string session_id;
  Timestamp ts = 0;
  std::optional<double> scene;
  std::optional<double> bed;
  std::optional<double> safety_zone;

  bool operator==(const MotionRecord&) const = default;
};

}  // namespace ward
