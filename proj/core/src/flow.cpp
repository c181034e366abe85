#include "ward/flow.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

#include "ward/errors.hpp"

namespace ward {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Inverts a symmetric positive definite 6x6 matrix by Gauss-Jordan elimination.
std::array<std::array<double, 6>, 6> invert6(std::array<std::array<double, 6>, 6> a) {
  std::array<std::array<double, 6>, 6> inv{};
  for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;
  for (int col = 0; col < 6; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 6; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = a[col][col];
    if (std::abs(p) < 1e-300) throw Error(ErrorCode::InvalidArgument, "singular polynomial basis");
    for (int k = 0; k < 6; ++k) {
      a[col][k] /= p;
      inv[col][k] /= p;
    }
    for (int r = 0; r < 6; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int k = 0; k < 6; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

// Five per-pixel quantities whose box average yields the normal equations:
// G = sum A^T A (g11, g12, g22) and h = sum A^T db (h1, h2).
constexpr double kFlowRidge = 1e-3;

struct NormalTerms {
  float g11, g12, g22, h1, h2;
};

void update_terms(const PolyExpansion& r0, const PolyExpansion& r1, const FlowField& flow,
                  std::vector<NormalTerms>& out) {
  const int w = r0.width;
  const int h = r0.height;
  out.resize(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const int xs = std::clamp(static_cast<int>(std::lround(x + flow.dx[i])), 0, w - 1);
      const int ys = std::clamp(static_cast<int>(std::lround(y + flow.dy[i])), 0, h - 1);
      // The second polynomial is sampled at an integer offset, so the prior
      // displacement entering the linearisation is that offset.
      const float dx = static_cast<float>(xs - x);
      const float dy = static_cast<float>(ys - y);
      const QuadCoeffs& p = r0.coeffs[i];
      const QuadCoeffs& q = r1.at(xs, ys);

      const float a11 = 0.5f * (p.axx + q.axx);
      const float a22 = 0.5f * (p.ayy + q.ayy);
      const float a12 = 0.25f * (p.axy + q.axy);
      const float b1 = -0.5f * (q.bx - p.bx) + a11 * dx + a12 * dy;
      const float b2 = -0.5f * (q.by - p.by) + a12 * dx + a22 * dy;

      out[i] = {a11 * a11 + a12 * a12, a12 * (a11 + a22), a12 * a12 + a22 * a22, a11 * b1 + a12 * b2,
                a12 * b1 + a22 * b2};
    }
  }
}

// Box average of the normal terms over winsize x winsize (replicate borders),
// then the 2x2 solve for the displacement.
void solve_flow(const std::vector<NormalTerms>& terms, int w, int h, int winsize, FlowField& flow) {
  const int r = winsize / 2;
  constexpr int K = 5;
  // Vertical running sums into a column buffer, then horizontal sums.
  std::vector<std::array<double, K>> col(static_cast<std::size_t>(w));
  std::vector<std::array<double, K>> padded(static_cast<std::size_t>(w + 2 * r));
  const double norm = 1.0 / (static_cast<double>(winsize) * winsize);

  auto term = [&](int x, int y) -> const NormalTerms& {
    return terms[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + x];
  };
  auto add = [](std::array<double, K>& acc, const NormalTerms& t, double s) {
    acc[0] += s * t.g11;
    acc[1] += s * t.g12;
    acc[2] += s * t.g22;
    acc[3] += s * t.h1;
    acc[4] += s * t.h2;
  };

  for (int x = 0; x < w; ++x) {
    col[x] = {};
    for (int dy = -r; dy <= r; ++dy) add(col[x], term(x, dy), 1.0);
  }
  for (int y = 0; y < h; ++y) {
    if (y > 0) {
      for (int x = 0; x < w; ++x) {
        add(col[x], term(x, y + r), 1.0);
        add(col[x], term(x, y - r - 1), -1.0);
      }
    }
    for (int x = -r; x < w + r; ++x) padded[x + r] = col[std::clamp(x, 0, w - 1)];
    std::array<double, K> acc{};
    for (int k = 0; k < winsize; ++k)
      for (int c = 0; c < K; ++c) acc[c] += padded[k][c];
    for (int x = 0; x < w; ++x) {
      if (x > 0) {
        for (int c = 0; c < K; ++c) acc[c] += padded[x + 2 * r][c] - padded[x - 1][c];
      }
      const double g11 = acc[0] * norm;
      const double g12 = acc[1] * norm;
      const double g22 = acc[2] * norm;
      const double h1 = acc[3] * norm;
      const double h2 = acc[4] * norm;
      // Ridge scaled to the local structure, so smooth low-contrast texture
      // is not shrunk towards zero the way a fixed determinant offset would.
      const double lambda = kFlowRidge * (g11 + g22) + 1e-12;
      const double a = g11 + lambda;
      const double d = g22 + lambda;
      const double idet = 1.0 / (a * d - g12 * g12);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      flow.dx[i] = static_cast<float>((d * h1 - g12 * h2) * idet);
      flow.dy[i] = static_cast<float>((a * h2 - g12 * h1) * idet);
    }
  }
}

FlowField upsample_flow(const FlowField& coarse, Dims fine) {
  GrayImage gx(coarse.width, coarse.height);
  GrayImage gy(coarse.width, coarse.height);
  gx.data = coarse.dx;
  gy.data = coarse.dy;
  const GrayImage ux = resize_bilinear(gx, fine);
  const GrayImage uy = resize_bilinear(gy, fine);
  const float sx = static_cast<float>(fine.width) / coarse.width;
  const float sy = static_cast<float>(fine.height) / coarse.height;
  FlowField out(fine.width, fine.height);
  for (std::size_t i = 0; i < out.dx.size(); ++i) {
    out.dx[i] = ux.data[i] * sx;
    out.dy[i] = uy.data[i] * sy;
  }
  return out;
}

GrayImage pyramid_level(const GrayImage& img, double scale, Dims size) {
  if (size == img.dims()) return img;
  const double sigma = (1.0 / scale - 1.0) * 0.5;
  const int ksize = std::max(3, static_cast<int>(std::lround(sigma * 5.0)) | 1);
  return resize_bilinear(gaussian_blur(img, sigma, ksize), size);
}

}  // namespace

void FlowParams::validate() const {
  if (!(pyr_scale > 0.0 && pyr_scale < 1.0)) throw Error(ErrorCode::InvalidConfig, "pyr_scale must be in (0,1)");
  if (levels < 1) throw Error(ErrorCode::InvalidConfig, "levels must be >= 1");
  if (winsize < 1 || winsize % 2 == 0) throw Error(ErrorCode::InvalidConfig, "winsize must be odd and positive");
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
  if (poly_n < 3 || poly_n % 2 == 0) throw Error(ErrorCode::InvalidConfig, "poly_n must be odd and >= 3");
  if (!(poly_sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "poly_sigma must be positive");
}

PolyExpansion polynomial_expansion(const GrayImage& gray, int poly_n, double poly_sigma) {
  const int r = poly_n / 2;
  const int w = gray.width;
  const int h = gray.height;

  std::vector<double> g(static_cast<std::size_t>(2 * r + 1));
  double gs = 0.0;
  for (int i = -r; i <= r; ++i) {
    g[i + r] = std::exp(-(i * i) / (2.0 * poly_sigma * poly_sigma));
    gs += g[i + r];
  }
  for (auto& v : g) v /= gs;

  // Gram matrix of the basis [1, x, y, x^2, y^2, xy] under the weights.
  std::array<std::array<double, 6>, 6> G{};
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double wgt = g[x + r] * g[y + r];
      const std::array<double, 6> phi{1.0, double(x), double(y), double(x) * x, double(y) * y, double(x) * y};
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) G[a][b] += wgt * phi[a] * phi[b];
    }
  }
  const auto Ginv = invert6(G);

  // Vertical pass: weighted sums of I, y*I, y^2*I per pixel.
  std::vector<std::array<double, 3>> vert(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::array<double, 3> acc{};
      for (int k = -r; k <= r; ++k) {
        const double v = g[k + r] * gray.at(x, std::clamp(y + k, 0, h - 1));
        acc[0] += v;
        acc[1] += k * v;
        acc[2] += double(k) * k * v;
      }
      vert[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }

  PolyExpansion out{w, h, std::vector<QuadCoeffs>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y) {
    const auto* row = vert.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      std::array<double, 6> m{};
      for (int k = -r; k <= r; ++k) {
        const auto& v = row[std::clamp(x + k, 0, w - 1)];
        const double gk = g[k + r];
        m[0] += gk * v[0];
        m[1] += gk * k * v[0];
        m[2] += gk * v[1];
        m[3] += gk * double(k) * k * v[0];
        m[4] += gk * v[2];
        m[5] += gk * k * v[1];
      }
      std::array<double, 6> c{};
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) c[a] += Ginv[a][b] * m[b];
      out.coeffs[static_cast<std::size_t>(y) * w + x] = {
          static_cast<float>(c[0]), static_cast<float>(c[1]), static_cast<float>(c[2]),
          static_cast<float>(c[3]), static_cast<float>(c[4]), static_cast<float>(c[5])};
    }
  }
  return out;
}

FlowField farneback_flow(const GrayImage& prev, const GrayImage& cur, const FlowParams& params,
                         FlowTimings* timings) {
  params.validate();
  if (prev.dims() != cur.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "flow inputs differ in size");
  }
  const auto t_start = Clock::now();
  FlowTimings t;

  // Level sizes round down; levels thinner than kMinPyramidSide are dropped.
  std::vector<Dims> sizes;
  std::vector<double> scales;
  double scale = 1.0;
  for (int k = 0; k < params.levels; ++k) {
    const Dims d{static_cast<int>(std::floor(prev.width * scale)), static_cast<int>(std::floor(prev.height * scale))};
    if (d.width < kMinPyramidSide || d.height < kMinPyramidSide) break;
    sizes.push_back(d);
    scales.push_back(scale);
    scale *= params.pyr_scale;
  }
  if (sizes.empty()) {
    sizes.push_back(prev.dims());
    scales.push_back(1.0);
  }

  FlowField flow;
  std::vector<NormalTerms> terms;
  for (int k = static_cast<int>(sizes.size()) - 1; k >= 0; --k) {
    auto t0 = Clock::now();
    const GrayImage p = pyramid_level(prev, scales[k], sizes[k]);
    const GrayImage c = pyramid_level(cur, scales[k], sizes[k]);
    t.pyramid_ms += ms_since(t0);

    t0 = Clock::now();
    const PolyExpansion r0 = polynomial_expansion(p, params.poly_n, params.poly_sigma);
    const PolyExpansion r1 = polynomial_expansion(c, params.poly_n, params.poly_sigma);
    t.expansion_ms += ms_since(t0);

    t0 = Clock::now();
    flow = flow.width == 0 ? FlowField(sizes[k].width, sizes[k].height) : upsample_flow(flow, sizes[k]);
    for (int it = 0; it < params.iterations; ++it) {
      update_terms(r0, r1, flow, terms);
      solve_flow(terms, sizes[k].width, sizes[k].height, params.winsize, flow);
    }
    t.solve_ms += ms_since(t0);
  }
  t.total_ms = ms_since(t_start);
  if (timings) *timings = t;
  return flow;
}

double roi_motion(const FlowField& flow, const RoiMask& mask, MotionAggregation agg) {
  if (flow.dims() != mask.dims()) throw Error(ErrorCode::DimensionMismatch, "flow and mask differ in size");
  double sum_mag = 0.0;
  double sum_dx = 0.0;
  double sum_dy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      if (!mask.test(x, y)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * flow.width + x;
      const double dx = flow.dx[i];
      const double dy = flow.dy[i];
      sum_mag += std::sqrt(dx * dx + dy * dy);
      sum_dx += dx;
      sum_dy += dy;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::EmptyMask, std::string(to_string(mask.kind())) + " mask is empty");
  if (agg == MotionAggregation::mean_magnitude) return sum_mag / static_cast<double>(n);
  return std::hypot(sum_dx / static_cast<double>(n), sum_dy / static_cast<double>(n));
}

}  // namespace ward
