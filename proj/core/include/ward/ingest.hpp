#pragma once

// External detection exports -> canonical JSONL, with line-numbered rejects.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ward/types.hpp"

namespace ward {

// "canonical": canonical JSONL (re-validated).
// "counts-csv": session_id,ts,person_count[,patient_count,staff_count,other_count]
//               [,scene_motion,bed_motion,zone_motion]
// Count rows become placeholder person boxes with one-hot role scores.
std::vector<std::string> known_adapters();

struct IngestReject {
  std::size_t line = 0;
  std::string reason;
};

struct IngestOptions {
  std::string adapter = "canonical";
  Dims frame_dims{1088, 612};
  // Optional session metadata CSV; sessions shorter than min_days are dropped.
  std::optional<std::filesystem::path> sessions_meta;
  double min_days = 2.0;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_written = 0;
  std::vector<IngestReject> rejects;
  std::size_t rows_filtered = 0;  // dropped by the session-duration rule
  std::filesystem::path output;
  std::filesystem::path rejects_file;
};

// Writes <out_dir>/<stem>.canonical.jsonl and <stem>.rejects.csv. Output
// depends only on the input, so re-ingesting yields identical files.
// Throws UnknownAdapter or SchemaMismatch.
IngestReport ingest_external(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                             const IngestOptions& opts);

// session_id,hospital_id,hospital_size,age_bucket,gender,start_ts,end_ts
std::vector<SessionMeta> read_session_meta(const std::filesystem::path& path);

}  // namespace ward
