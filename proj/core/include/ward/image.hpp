#pragma once

#include <cstddef>
#include <vector>

#include "ward/types.hpp"

namespace ward {

// Single-channel float image, intensities on the 0..255 scale.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  Dims dims() const noexcept { return {width, height}; }
  float& at(int x, int y) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  double mean() const noexcept;
};

enum class Interpolation { bilinear, bicubic };

// Pixel-centre aligned resize of an 8-bit frame. Bicubic uses the
// Catmull-Rom kernel (a = -0.5). Borders replicate. Identity sizes copy.
Frame resize_frame(const Frame& f, Dims out, Interpolation interp);

GrayImage resize_bilinear(const GrayImage& img, Dims out);

// BT.601 luma (0.299, 0.587, 0.114); NIR frames pass through.
GrayImage to_grayscale(const Frame& f);

inline constexpr Dims kFlowDims{480, 270};

GrayImage to_grayscale_downsampled(const Frame& f, Dims out = kFlowDims);

// Separable Gaussian with replicate borders; ksize must be odd.
GrayImage gaussian_blur(const GrayImage& img, double sigma, int ksize);

}  // namespace ward
