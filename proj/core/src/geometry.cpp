#include "ward/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ward/errors.hpp"

namespace ward {

namespace {

double cross(Point o, Point a, Point b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) noexcept { return (v > 0) - (v < 0); }

bool on_segment(Point a, Point b, Point p) noexcept {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) noexcept {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

double shoelace(const std::vector<Point>& v) noexcept {
  double s = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error(ErrorCode::DegeneratePolygon, "polygon needs at least 3 vertices");
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::DegeneratePolygon, "non-finite vertex");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == vertices_[(i + 1) % n]) {
      throw Error(ErrorCode::DegeneratePolygon, "repeated consecutive vertex");
    }
  }
  if (std::abs(shoelace(vertices_)) <= 1e-12) {
    throw Error(ErrorCode::DegeneratePolygon, "polygon has zero area");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i];
    const Point b = vertices_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = vertices_[j];
      const Point d = vertices_[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex; a collinear
        // fold-back is a self-overlap.
        const Point shared = j == i + 1 ? b : a;
        const Point other_a = j == i + 1 ? a : b;
        const Point other_c = j == i + 1 ? d : c;
        if (cross(shared, other_a, other_c) == 0.0) {
          const double dot = (other_a.x - shared.x) * (other_c.x - shared.x) +
                             (other_a.y - shared.y) * (other_c.y - shared.y);
          if (dot > 0.0) throw Error(ErrorCode::DegeneratePolygon, "polygon folds back on itself");
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) {
        throw Error(ErrorCode::DegeneratePolygon, "polygon is self-intersecting");
      }
    }
  }
}

double Polygon::signed_area() const noexcept { return shoelace(vertices_); }

double Polygon::area() const noexcept { return std::abs(signed_area()); }

double Polygon::perimeter() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % n];
    s += std::hypot(b.x - a.x, b.y - a.y);
  }
  return s;
}

Point Polygon::centroid() const noexcept {
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % n];
    const double k = a.x * b.y - b.x * a.y;
    cx += (a.x + b.x) * k;
    cy += (a.y + b.y) * k;
  }
  const double a6 = 6.0 * signed_area();
  return {cx / a6, cy / a6};
}

bool Polygon::is_convex() const noexcept {
  int dir = 0;
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    const int s = sign(cross(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]));
    if (s == 0) continue;
    if (dir == 0) dir = s;
    else if (s != dir) return false;
  }
  return true;
}

bool Polygon::contains(Point p) const noexcept {
  bool inside = false;
  for (std::size_t i = 0, n = vertices_.size(), j = n - 1; i < n; j = i++) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Polygon expand_polygon(const Polygon& p, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidArgument, "expansion factor must be finite and >= 0");
  }
  if (factor == 0.0) return p;
  const Point c = p.centroid();
  const double k = 1.0 + factor;
  std::vector<Point> out;
  out.reserve(p.size());
  for (const Point& v : p.vertices()) out.push_back({c.x + k * (v.x - c.x), c.y + k * (v.y - c.y)});
  return Polygon(std::move(out));
}

Polygon scale_coordinates(const Polygon& p, double sx, double sy) {
  std::vector<Point> out;
  out.reserve(p.size());
  for (const Point& v : p.vertices()) out.push_back({v.x * sx, v.y * sy});
  return Polygon(std::move(out));
}

std::string_view to_string(RoiKind kind) noexcept {
  switch (kind) {
    case RoiKind::scene: return "scene";
    case RoiKind::bed: return "bed";
    case RoiKind::safety_zone: return "safety_zone";
  }
  return "scene";
}

RoiMask::RoiMask(RoiKind kind, int width, int height) : kind_(kind), width_(width), height_(height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

RoiMask RoiMask::full(RoiKind kind, int width, int height) {
  RoiMask m(kind, width, height);
  std::fill(m.bits_.begin(), m.bits_.end(), std::uint8_t{1});
  return m;
}

std::size_t RoiMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RoiMask rasterize(const Polygon& p, int width, int height, RoiKind kind) {
  RoiMask mask(kind, width, height);
  const auto& v = p.vertices();
  const std::size_t n = v.size();
  std::vector<double> xs;
  xs.reserve(n);
  for (int j = 0; j < height; ++j) {
    const double yc = j + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % n];
      // Half-open in y so a vertex on the scanline is counted once.
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y)) {
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // centres i + 0.5 in [xl, xr)
      const double first = std::ceil(xs[k] - 0.5);
      const double last = std::ceil(xs[k + 1] - 0.5) - 1.0;
      const int i0 = static_cast<int>(std::max(first, 0.0));
      const int i1 = static_cast<int>(std::min(last, static_cast<double>(width - 1)));
      for (int i = i0; i <= i1; ++i) mask.set(i, j);
    }
  }
  return mask;
}

RoiMask rect_mask(const BoundingBox& box, Dims source, Dims mask_dims, RoiKind kind) {
  RoiMask mask(kind, mask_dims.width, mask_dims.height);
  const double sx = static_cast<double>(mask_dims.width) / source.width;
  const double sy = static_cast<double>(mask_dims.height) / source.height;
  const double x0 = box.x * sx;
  const double x1 = (box.x + box.w) * sx;
  const double y0 = box.y * sy;
  const double y1 = (box.y + box.h) * sy;
  const int i0 = std::max(0, static_cast<int>(std::ceil(x0 - 0.5)));
  const int i1 = std::min(mask_dims.width - 1, static_cast<int>(std::ceil(x1 - 0.5)) - 1);
  const int j0 = std::max(0, static_cast<int>(std::ceil(y0 - 0.5)));
  const int j1 = std::min(mask_dims.height - 1, static_cast<int>(std::ceil(y1 - 0.5)) - 1);
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) mask.set(i, j);
  return mask;
}

std::optional<RoiMask> bed_roi_from_detection(const DetectionRecord& rec, Dims frame_dims) {
  return bed_roi_from_detection(rec, frame_dims, frame_dims);
}

std::optional<RoiMask> bed_roi_from_detection(const DetectionRecord& rec, Dims frame_dims,
                                              Dims mask_dims) {
  const BoundingBox* best = nullptr;
  for (const auto& b : rec.boxes) {
    if (b.cls != ObjectClass::bed) continue;
    if (best == nullptr || b.confidence > best->confidence) best = &b;
  }
  if (best == nullptr) return std::nullopt;
  // Clamp to the frame first so a half-visible bed maps to its visible part.
  BoundingBox clamped = *best;
  const double x0 = std::clamp(best->x, 0.0, static_cast<double>(frame_dims.width));
  const double y0 = std::clamp(best->y, 0.0, static_cast<double>(frame_dims.height));
  const double x1 = std::clamp(best->x + best->w, 0.0, static_cast<double>(frame_dims.width));
  const double y1 = std::clamp(best->y + best->h, 0.0, static_cast<double>(frame_dims.height));
  clamped.x = x0;
  clamped.y = y0;
  clamped.w = x1 - x0;
  clamped.h = y1 - y0;
  return rect_mask(clamped, frame_dims, mask_dims, RoiKind::bed);
}

Point anchor_point(const BoundingBox& b) {
  if (b.cls != ObjectClass::person) {
    throw Error(ErrorCode::WrongClass, "anchor requested for a " + std::string(to_string(b.cls)) + " box");
  }
  return {b.x + b.w / 2.0, b.y + b.h};
}

std::string_view to_string(CrossingDirection d) noexcept {
  return d == CrossingDirection::exit ? "exit" : "entry";
}

bool zone_contains(const RoiMask& zone, Point p) noexcept {
  const int i = std::clamp(static_cast<int>(std::floor(p.x)), 0, zone.width() - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p.y)), 0, zone.height() - 1);
  return zone.test(i, j);
}

std::vector<CrossingEvent> detect_crossings(const DetectionRecord& prev, const DetectionRecord& cur,
                                            const RoiMask& zone, double gate_fraction) {
  if (prev.session_id != cur.session_id || prev.ts + 1 != cur.ts) {
    throw Error(ErrorCode::InvalidArgument, "crossings need consecutive seconds of one session");
  }
  struct Anchor {
    int index;
    Point p;
  };
  auto anchors = [&zone](const DetectionRecord& rec) {
    std::vector<Anchor> out;
    for (std::size_t i = 0; i < rec.boxes.size(); ++i) {
      const auto& b = rec.boxes[i];
      if (b.x + b.w > zone.width() + 1e-9 || b.y + b.h > zone.height() + 1e-9) {
        throw Error(ErrorCode::ZoneDimensionMismatch,
                    "box extends past the " + std::to_string(zone.width()) + "x" +
                        std::to_string(zone.height()) + " zone mask");
      }
      if (b.cls == ObjectClass::person) out.push_back({static_cast<int>(i), anchor_point(b)});
    }
    return out;
  };
  const auto a = anchors(prev);
  const auto b = anchors(cur);

  const double gate = gate_fraction * std::hypot(zone.width(), zone.height());
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = std::hypot(a[i].p.x - b[j].p.x, a[i].p.y - b[j].p.y);
      if (d <= gate) pairs.emplace_back(d, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);
  std::vector<CrossingEvent> events;
  for (const auto& [d, i, j] : pairs) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = true;
    const bool was_in = zone_contains(zone, a[i].p);
    const bool is_in = zone_contains(zone, b[j].p);
    if (was_in == is_in) continue;
    events.push_back({cur.session_id, cur.ts, was_in ? CrossingDirection::exit : CrossingDirection::entry,
                      b[j].index});
  }
  std::sort(events.begin(), events.end(),
            [](const CrossingEvent& l, const CrossingEvent& r) { return l.person_index < r.person_index; });
  return events;
}

}  // namespace ward
