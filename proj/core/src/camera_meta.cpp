#include "ward/camera_meta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ward/csv.hpp"
#include "ward/errors.hpp"

namespace ward {

namespace {

int bin_of(double v, double lo, double hi, int bins) {
  const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

std::optional<BedPlacementStat> bed_stats(const FrameLabel& label, Dims frame_dims) {
  if (frame_dims.width < 1 || frame_dims.height < 1) throw Error(ErrorCode::InvalidArgument, "frame dims must be positive");
  const BoundingBox* bed = nullptr;
  for (const auto& b : label.boxes) {
    if (b.cls == ObjectClass::bed && (!bed || b.confidence > bed->confidence)) bed = &b;
  }
  if (!bed) return std::nullopt;
  const double W = frame_dims.width, H = frame_dims.height;
  const double cx = bed->x + bed->w / 2.0;
  const double cy = bed->y + bed->h / 2.0;
  BedPlacementStat s;
  s.session_id = label.session_id;
  s.ts = label.ts;
  s.area_fraction = bed->w * bed->h / (W * H);
  s.cx = cx / W;
  s.cy = cy / H;
  s.angle_deg = std::atan2(cx - W / 2.0, H - cy) * 180.0 / std::numbers::pi;
  return s;
}

PlacementHistogram placement_distribution(std::span<const BedPlacementStat> stats, int bins_x, int bins_y) {
  if (bins_x < 1 || bins_y < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin per axis");
  PlacementHistogram h;
  h.bins_x = bins_x;
  h.bins_y = bins_y;
  h.centroid.assign(static_cast<std::size_t>(bins_x) * bins_y, 0);
  h.area_angle.assign(static_cast<std::size_t>(PlacementHistogram::kAreaBins) * PlacementHistogram::kAngleBins, 0);
  for (const auto& s : stats) {
    const int bx = bin_of(s.cx, 0.0, 1.0, bins_x);
    const int by = bin_of(s.cy, 0.0, 1.0, bins_y);
    ++h.centroid[static_cast<std::size_t>(by) * bins_x + bx];
    // area bins are (k/10, (k+1)/10]
    const int ab = std::clamp(static_cast<int>(std::ceil(s.area_fraction * PlacementHistogram::kAreaBins)) - 1, 0,
                              PlacementHistogram::kAreaBins - 1);
    const int gb = bin_of(s.angle_deg, -90.0, 90.0, PlacementHistogram::kAngleBins);
    ++h.area_angle[static_cast<std::size_t>(ab) * PlacementHistogram::kAngleBins + gb];
    ++h.total;
  }
  return h;
}

void write_bed_stats_csv(std::ostream& out, std::span<const BedPlacementStat> stats) {
  csv::Writer w(out, "bed-placement", {"session_id", "ts", "area_fraction", "cx", "cy", "angle_deg"},
                {kAngleDefinition});
  for (const auto& s : stats) {
    w.row({s.session_id, std::to_string(s.ts), csv::format_number(s.area_fraction), csv::format_number(s.cx),
           csv::format_number(s.cy), csv::format_number(s.angle_deg)});
  }
}

void write_centroid_histogram_csv(std::ostream& out, const PlacementHistogram& h) {
  csv::Writer w(out, "bed-centroid-histogram", {"bin_x", "bin_y", "cx_lo", "cx_hi", "cy_lo", "cy_hi", "count"});
  for (int by = 0; by < h.bins_y; ++by) {
    for (int bx = 0; bx < h.bins_x; ++bx) {
      w.row({std::to_string(bx), std::to_string(by), csv::format_number(static_cast<double>(bx) / h.bins_x),
             csv::format_number(static_cast<double>(bx + 1) / h.bins_x),
             csv::format_number(static_cast<double>(by) / h.bins_y),
             csv::format_number(static_cast<double>(by + 1) / h.bins_y),
             std::to_string(h.centroid[static_cast<std::size_t>(by) * h.bins_x + bx])});
    }
  }
}

void write_area_angle_csv(std::ostream& out, const PlacementHistogram& h) {
  csv::Writer w(out, "bed-area-angle", {"area_lo", "area_hi", "angle_lo", "angle_hi", "count"}, {kAngleDefinition});
  constexpr int A = PlacementHistogram::kAreaBins, G = PlacementHistogram::kAngleBins;
  for (int a = 0; a < A; ++a) {
    for (int g = 0; g < G; ++g) {
      w.row({csv::format_number(static_cast<double>(a) / A), csv::format_number(static_cast<double>(a + 1) / A),
             csv::format_number(-90.0 + 180.0 * g / G), csv::format_number(-90.0 + 180.0 * (g + 1) / G),
             std::to_string(h.area_angle[static_cast<std::size_t>(a) * G + g])});
    }
  }
}

}  // namespace ward
