#pragma once

// Bed placement statistics from labeled frames, used to compare camera
// mounting positions across rooms.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ward/evaluation.hpp"

namespace ward {

// Viewing-angle proxy, printed into the stats CSV so outputs describe themselves.
inline constexpr const char* kAngleDefinition =
    "angle_deg = atan2(cx_px - W/2, H - cy_px) in degrees; positive when the bed centre is right of the frame centre";

struct BedPlacementStat {
  std::string session_id;
  Timestamp ts = 0;
  double area_fraction = 0.0;  // (w*h)/(W*H)
  double cx = 0.0;             // centroid, normalized to [0,1]
  double cy = 0.0;
  double angle_deg = 0.0;
};

// Uses the highest-confidence bed box (first on ties); nullopt without a bed.
std::optional<BedPlacementStat> bed_stats(const FrameLabel& label, Dims frame_dims);

struct PlacementHistogram {
  int bins_x = 20;
  int bins_y = 20;
  std::vector<std::size_t> centroid;  // row-major [by][bx]

  static constexpr int kAreaBins = 10;   // (0, 1]
  static constexpr int kAngleBins = 18;  // [-90, 90]
  std::vector<std::size_t> area_angle;   // row-major [area][angle]

  std::size_t total = 0;
};

// Values on the upper edge fall into the last bin.
PlacementHistogram placement_distribution(std::span<const BedPlacementStat> stats, int bins_x = 20,
                                          int bins_y = 20);

void write_bed_stats_csv(std::ostream& out, std::span<const BedPlacementStat> stats);
void write_centroid_histogram_csv(std::ostream& out, const PlacementHistogram& h);
void write_area_angle_csv(std::ostream& out, const PlacementHistogram& h);

}  // namespace ward
