#include "ward/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ward/errors.hpp"

namespace ward {

namespace {

// Source taps and weights for one output coordinate.
template <int Taps>
struct Kernel1D {
  std::array<int, Taps> idx;
  std::array<float, Taps> w;
};

float cubic_weight(float t) noexcept {
  constexpr float a = -0.5f;
  t = std::abs(t);
  if (t <= 1.0f) return ((a + 2.0f) * t - (a + 3.0f)) * t * t + 1.0f;
  if (t < 2.0f) return ((a * t - 5.0f * a) * t + 8.0f * a) * t - 4.0f * a;
  return 0.0f;
}

std::vector<Kernel1D<2>> linear_taps(int in, int out) {
  std::vector<Kernel1D<2>> k(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double s = (i + 0.5) * scale - 0.5;
    const double f = std::floor(s);
    const float t = static_cast<float>(s - f);
    const int i0 = static_cast<int>(f);
    k[i].idx = {std::clamp(i0, 0, in - 1), std::clamp(i0 + 1, 0, in - 1)};
    k[i].w = {1.0f - t, t};
  }
  return k;
}

std::vector<Kernel1D<4>> cubic_taps(int in, int out) {
  std::vector<Kernel1D<4>> k(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double s = (i + 0.5) * scale - 0.5;
    const double f = std::floor(s);
    const float t = static_cast<float>(s - f);
    const int i0 = static_cast<int>(f);
    for (int m = 0; m < 4; ++m) {
      k[i].idx[m] = std::clamp(i0 - 1 + m, 0, in - 1);
      k[i].w[m] = cubic_weight(t - static_cast<float>(m - 1));
    }
  }
  return k;
}

std::uint8_t saturate(float v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Horizontal pass into a float buffer, then vertical pass with rounding.
template <int Taps>
std::vector<std::uint8_t> resize_separable(std::span<const std::uint8_t> src, int sw, int sh, int ch,
                                           int dw, int dh, const std::vector<Kernel1D<Taps>>& kx,
                                           const std::vector<Kernel1D<Taps>>& ky) {
  std::vector<float> tmp(static_cast<std::size_t>(sh) * dw * ch);
  for (int y = 0; y < sh; ++y) {
    const std::uint8_t* row = src.data() + static_cast<std::size_t>(y) * sw * ch;
    float* out = tmp.data() + static_cast<std::size_t>(y) * dw * ch;
    for (int x = 0; x < dw; ++x) {
      for (int c = 0; c < ch; ++c) {
        float acc = 0.0f;
        for (int m = 0; m < Taps; ++m) acc += kx[x].w[m] * row[kx[x].idx[m] * ch + c];
        out[x * ch + c] = acc;
      }
    }
  }
  std::vector<std::uint8_t> dst(static_cast<std::size_t>(dw) * dh * ch);
  const std::size_t stride = static_cast<std::size_t>(dw) * ch;
  for (int y = 0; y < dh; ++y) {
    std::uint8_t* out = dst.data() + y * stride;
    for (std::size_t i = 0; i < stride; ++i) {
      float acc = 0.0f;
      for (int m = 0; m < Taps; ++m) acc += ky[y].w[m] * tmp[ky[y].idx[m] * stride + i];
      out[i] = saturate(acc);
    }
  }
  return dst;
}

}  // namespace

double GrayImage::mean() const noexcept {
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (float v : data) s += v;
  return s / static_cast<double>(data.size());
}

Frame resize_frame(const Frame& f, Dims out, Interpolation interp) {
  if (out.width < 1 || out.height < 1) throw Error(ErrorCode::InvalidArgument, "resize target must be positive");
  if (out == f.dims()) return f;
  const int ch = f.channels();
  std::vector<std::uint8_t> px;
  if (interp == Interpolation::bilinear) {
    px = resize_separable<2>(f.pixels(), f.width(), f.height(), ch, out.width, out.height,
                             linear_taps(f.width(), out.width), linear_taps(f.height(), out.height));
  } else {
    px = resize_separable<4>(f.pixels(), f.width(), f.height(), ch, out.width, out.height,
                             cubic_taps(f.width(), out.width), cubic_taps(f.height(), out.height));
  }
  return Frame(f.session_id(), f.ts(), out.width, out.height, f.mode(), std::move(px));
}

GrayImage resize_bilinear(const GrayImage& img, Dims out) {
  if (out == img.dims()) return img;
  const auto kx = linear_taps(img.width, out.width);
  const auto ky = linear_taps(img.height, out.height);
  GrayImage tmp(out.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      tmp.at(x, y) = kx[x].w[0] * img.at(kx[x].idx[0], y) + kx[x].w[1] * img.at(kx[x].idx[1], y);
    }
  }
  GrayImage dst(out.width, out.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      dst.at(x, y) = ky[y].w[0] * tmp.at(x, ky[y].idx[0]) + ky[y].w[1] * tmp.at(x, ky[y].idx[1]);
    }
  }
  return dst;
}

GrayImage to_grayscale(const Frame& f) {
  GrayImage g(f.width(), f.height());
  const auto px = f.pixels();
  if (f.mode() == FrameMode::NIR) {
    std::transform(px.begin(), px.end(), g.data.begin(), [](std::uint8_t v) { return static_cast<float>(v); });
    return g;
  }
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    g.data[i] = 0.299f * px[3 * i] + 0.587f * px[3 * i + 1] + 0.114f * px[3 * i + 2];
  }
  return g;
}

GrayImage to_grayscale_downsampled(const Frame& f, Dims out) {
  return resize_bilinear(to_grayscale(f), out);
}

GrayImage gaussian_blur(const GrayImage& img, double sigma, int ksize) {
  if (ksize < 1 || ksize % 2 == 0) throw Error(ErrorCode::InvalidArgument, "blur kernel size must be odd");
  const int r = ksize / 2;
  std::vector<float> k(static_cast<std::size_t>(ksize));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[i + r] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);

  GrayImage tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float acc = 0.0f;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(std::clamp(x + i, 0, img.width - 1), y);
      tmp.at(x, y) = acc;
    }
  }
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float acc = 0.0f;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(x, std::clamp(y + i, 0, img.height - 1));
      out.at(x, y) = acc;
    }
  }
  return out;
}

}  // namespace ward
