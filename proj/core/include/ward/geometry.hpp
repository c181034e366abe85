#pragma once

// Regions of interest: polygons, pixel masks and boundary-crossing detection.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ward/types.hpp"

namespace ward {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

// Closed, simple polygon with non-zero area. Construction validates.
class Polygon {
 public:
  // Throws DegeneratePolygon for < 3 vertices, zero area or self-intersection.
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  // Shoelace area; positive for counter-clockwise winding in a y-up frame.
  double signed_area() const noexcept;
  double area() const noexcept;
  double perimeter() const noexcept;
  Point centroid() const noexcept;
  bool is_convex() const noexcept;
  // Even-odd containment test.
  bool contains(Point p) const noexcept;

 private:
  std::vector<Point> vertices_;
};

// Scales about the area centroid by (1 + factor). The perimeter scales by the
// same ratio, which is how the safety zone's 10% enlargement is realised.
Polygon expand_polygon(const Polygon& p, double factor);

// Per-axis coordinate scaling, used to move a polygon between resolutions.
Polygon scale_coordinates(const Polygon& p, double sx, double sy);

enum class RoiKind { scene, bed, safety_zone };
std::string_view to_string(RoiKind kind) noexcept;

class RoiMask {
 public:
  RoiMask(RoiKind kind, int width, int height);
  static RoiMask full(RoiKind kind, int width, int height);

  RoiKind kind() const noexcept { return kind_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Dims dims() const noexcept { return {width_, height_}; }

  bool test(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool on = true) noexcept {
    bits_[static_cast<std::size_t>(y) * width_ + x] = on ? 1 : 0;
  }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  bool operator==(const RoiMask&) const = default;

 private:
  RoiKind kind_;
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// Pixel (i, j) is set iff its centre (i + 0.5, j + 0.5) is inside p under the
// even-odd rule. Parts of p outside the frame are ignored.
RoiMask rasterize(const Polygon& p, int width, int height, RoiKind kind = RoiKind::safety_zone);

// Mask of pixels whose centres fall inside `box` (given in `source` pixel
// coordinates) after rescaling to `mask` resolution.
RoiMask rect_mask(const BoundingBox& box, Dims source, Dims mask, RoiKind kind);

// Rectangle mask of the highest-confidence bed box; nullopt when no bed.
// Ties go to the first bed box.
std::optional<RoiMask> bed_roi_from_detection(const DetectionRecord& rec, Dims frame_dims);
std::optional<RoiMask> bed_roi_from_detection(const DetectionRecord& rec, Dims frame_dims,
                                              Dims mask_dims);

// Bottom-centre of a person box (foot position proxy). Throws WrongClass.
Point anchor_point(const BoundingBox& b);

enum class CrossingDirection { exit, entry };
std::string_view to_string(CrossingDirection d) noexcept;

struct CrossingEvent {
  std::string session_id;
  Timestamp ts = 0;
  CrossingDirection direction = CrossingDirection::exit;
  int person_index = 0;  // index into cur.boxes

  bool operator==(const CrossingEvent&) const = default;
};

inline constexpr double kDefaultCrossingGate = 0.15;

// Zone membership of a point, clamped to the mask so edge anchors resolve.
bool zone_contains(const RoiMask& zone, Point p) noexcept;

// Matches person anchors between two consecutive seconds (greedy, nearest
// first, gated at gate_fraction x frame diagonal) and reports zone
// transitions. `zone` must be at the records' frame resolution.
// Throws ZoneDimensionMismatch when a box does not fit in the zone mask and
// InvalidArgument when the records are not consecutive seconds of a session.
std::vector<CrossingEvent> detect_crossings(const DetectionRecord& prev, const DetectionRecord& cur,
                                            const RoiMask& zone,
                                            double gate_fraction = kDefaultCrossingGate);

}  // namespace ward
