#pragma once

// Append-only JSONL store partitioned by session and local date.
//
//   <root>/manifest.json
//   <root>/<session>/<YYYY-MM-DD>/part-0000.jsonl
//
// A segment is written as part-NNNN.jsonl.open and renamed once sealed; the
// manifest lists sealed segments with their SHA-256.

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ward/record_io.hpp"

namespace ward {

class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void append(const CanonicalRecord& rec) = 0;
};

struct SegmentInfo {
  std::string path;  // relative to the store root
  std::string session_id;
  std::string date;
  std::size_t rows = 0;
  Timestamp first_ts = 0;
  Timestamp last_ts = 0;
  std::string sha256;
};

std::string sha256_hex(const std::filesystem::path& file);

class Store : public RecordSink {
 public:
  // Throws InvalidArgument when root already holds a manifest.
  explicit Store(std::filesystem::path root, int utc_offset_s = 0, std::size_t segment_rows = 3600);
  ~Store() override;

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Safe to call concurrently for different sessions. Throws OutOfOrderRecord
  // when a session's ts does not increase.
  void append(const CanonicalRecord& rec) override;

  // Seals open segments and writes the manifest. Idempotent.
  void close();

  const std::filesystem::path& root() const noexcept { return root_; }

  // Re-hashes every segment. Throws StoreCorrupt on a mismatch or missing file.
  static std::vector<SegmentInfo> verify(const std::filesystem::path& root);
  static std::vector<SegmentInfo> read_manifest(const std::filesystem::path& root);
  // All rows in manifest order (session, date, part); optionally one session.
  static std::vector<CanonicalRecord> load(const std::filesystem::path& root,
                                           const std::optional<std::string>& session = std::nullopt);

 private:
  struct OpenSegment {
    std::string date;
    int part = 0;
    std::filesystem::path file;
    std::ofstream out;
    std::size_t rows = 0;
    Timestamp first_ts = 0;
    Timestamp last_ts = 0;
  };
  struct SessionState {
    std::optional<Timestamp> last_ts;
    std::map<std::string, int> next_part;  // by date
    std::optional<OpenSegment> open;
  };

  void seal(const std::string& session, SessionState& s);
  void write_manifest();

  std::filesystem::path root_;
  int utc_offset_s_;
  std::size_t segment_rows_;
  std::mutex mu_;
  std::map<std::string, SessionState> sessions_;
  std::vector<SegmentInfo> sealed_;
  bool closed_ = false;
};

}  // namespace ward
