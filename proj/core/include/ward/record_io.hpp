#pragma once

// Canonical JSONL rows: one object per session-second.
//
//   {"session_id":..., "ts":...,
//    "boxes":[{"cls":"person","x":..,"y":..,"w":..,"h":..,"conf":..}],
//    "roles":[{"patient":..,"staff":..,"other":..} | null],   (parallel to boxes)
//    "motion":{"scene":..,"bed":..,"safety_zone":..},          (optional)
//    "logical":{"person_alone":..,"patient_alone":..,
//               "supervised_by_staff":..,"moving":..,
//               "smoothed_person_count":..}}                   (optional)
//
// Files written by this library start with a schema header line
// {"schema":"ward-sentinel/<kind>","schema_version":1}; readers accept files
// with or without it.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ward/flow.hpp"
#include "ward/logic.hpp"
#include "ward/types.hpp"

namespace ward {

inline constexpr int kSchemaVersion = 1;

struct CanonicalRecord {
  DetectionRecord detection;
  std::optional<MotionRecord> motion;
  std::optional<LogicalState> logical;

  bool operator==(const CanonicalRecord&) const = default;
};

std::string schema_header(std::string_view kind);
// True if `line` is a schema header; throws SchemaMismatch on an unsupported version.
bool is_schema_header(std::string_view line);

std::string to_json_line(const CanonicalRecord& rec);
std::string to_json_line(const DetectionRecord& rec);
// Throws MalformedRecord on structural problems.
CanonicalRecord parse_canonical_line(std::string_view line);

// Streams canonical rows from a file, skipping blank lines and headers.
class CanonicalReader {
 public:
  explicit CanonicalReader(const std::filesystem::path& path);
  std::optional<CanonicalRecord> next();
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

std::vector<CanonicalRecord> read_canonical_file(const std::filesystem::path& path);
void write_canonical_file(const std::filesystem::path& path, const std::vector<CanonicalRecord>& rows);

}  // namespace ward
