#include "ward/store.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "ward/errors.hpp"
#include "ward/timeutil.hpp"

namespace ward {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::StoreCorrupt, "missing segment " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "cannot initialise SHA-256");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

Store::Store(fs::path root, int utc_offset_s, std::size_t segment_rows)
    : root_(std::move(root)), utc_offset_s_(utc_offset_s), segment_rows_(segment_rows) {
  if (segment_rows_ == 0) throw Error(ErrorCode::InvalidArgument, "segment_rows must be positive");
  if (fs::exists(root_ / "manifest.json")) {
    throw Error(ErrorCode::InvalidArgument, "store " + root_.string() + " already exists; use a fresh output directory");
  }
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + root_.string() + ": " + ec.message());
}

Store::~Store() {
  try {
    close();
  } catch (...) {
    // destructors must not throw; callers wanting errors call close()
  }
}

void Store::append(const CanonicalRecord& rec) {
  const auto& sid = rec.detection.session_id;
  const Timestamp ts = rec.detection.ts;
  if (sid.empty() || sid.find_first_of("/\\") != std::string::npos || sid == "." || sid == "..") {
    throw Error(ErrorCode::MalformedRecord, "session id '" + sid + "' cannot name a store partition");
  }
  std::lock_guard lock(mu_);
  if (closed_) throw Error(ErrorCode::InvalidArgument, "store is closed");
  SessionState& s = sessions_[sid];
  if (s.last_ts && ts <= *s.last_ts) {
    throw Error(ErrorCode::OutOfOrderRecord, sid + ": ts " + std::to_string(ts) + " not after " +
                                                 std::to_string(*s.last_ts));
  }
  const std::string date = format_date(local_day_index(ts, utc_offset_s_));
  if (s.open && (s.open->date != date || s.open->rows >= segment_rows_)) seal(sid, s);
  if (!s.open) {
    OpenSegment seg;
    seg.date = date;
    seg.part = s.next_part[date]++;
    char name[32];
    std::snprintf(name, sizeof name, "part-%04d.jsonl.open", seg.part);
    const fs::path dir = root_ / sid / date;
    fs::create_directories(dir);
    seg.file = dir / name;
    seg.out.open(seg.file, std::ios::binary | std::ios::trunc);
    if (!seg.out) throw Error(ErrorCode::Io, "cannot write " + seg.file.string());
    seg.out << schema_header("canonical") << '\n';
    seg.first_ts = ts;
    s.open = std::move(seg);
  }
  s.open->out << to_json_line(rec) << '\n';
  if (!s.open->out) throw Error(ErrorCode::Io, "write failed for " + s.open->file.string());
  ++s.open->rows;
  s.open->last_ts = ts;
  s.last_ts = ts;
}

void Store::seal(const std::string& session, SessionState& s) {
  OpenSegment& seg = *s.open;
  seg.out.close();
  if (!seg.out) throw Error(ErrorCode::Io, "failed to flush " + seg.file.string());
  fs::path sealed = seg.file;
  sealed.replace_extension();  // drop ".open"
  fs::rename(seg.file, sealed);
  sealed_.push_back({fs::relative(sealed, root_).generic_string(), session, seg.date, seg.rows, seg.first_ts,
                     seg.last_ts, sha256_hex(sealed)});
  s.open.reset();
}

void Store::close() {
  std::lock_guard lock(mu_);
  if (closed_) return;
  for (auto& [sid, s] : sessions_)
    if (s.open) seal(sid, s);
  write_manifest();
  closed_ = true;
}

void Store::write_manifest() {
  std::vector<SegmentInfo> segs = sealed_;
  std::sort(segs.begin(), segs.end(), [](const SegmentInfo& a, const SegmentInfo& b) { return a.path < b.path; });
  json j;
  j["schema"] = "ward-sentinel/store-manifest";
  j["schema_version"] = kSchemaVersion;
  json arr = json::array();
  for (const auto& s : segs) {
    arr.push_back({{"path", s.path},
                   {"session_id", s.session_id},
                   {"date", s.date},
                   {"rows", s.rows},
                   {"first_ts", s.first_ts},
                   {"last_ts", s.last_ts},
                   {"sha256", s.sha256}});
  }
  j["segments"] = std::move(arr);
  const fs::path tmp = root_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + root_.string());
  }
  fs::rename(tmp, root_ / "manifest.json");
}

std::vector<SegmentInfo> Store::read_manifest(const fs::path& root) {
  std::ifstream in(root / "manifest.json");
  if (!in) throw Error(ErrorCode::StoreCorrupt, "no manifest in " + root.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("segments")) throw Error(ErrorCode::StoreCorrupt, "unreadable manifest");
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw Error(ErrorCode::SchemaMismatch, "manifest schema version " + j.value("schema_version", json()).dump());
  }
  std::vector<SegmentInfo> out;
  try {
    for (const auto& s : j["segments"]) {
      out.push_back({s.at("path").get<std::string>(), s.at("session_id").get<std::string>(),
                     s.at("date").get<std::string>(), s.at("rows").get<std::size_t>(),
                     s.at("first_ts").get<Timestamp>(), s.at("last_ts").get<Timestamp>(),
                     s.at("sha256").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("bad manifest entry: ") + e.what());
  }
  return out;
}

std::vector<SegmentInfo> Store::verify(const fs::path& root) {
  auto segs = read_manifest(root);
  for (const auto& s : segs) {
    const std::string h = sha256_hex(root / s.path);
    if (h != s.sha256) throw Error(ErrorCode::StoreCorrupt, "hash mismatch for " + s.path);
  }
  return segs;
}

std::vector<CanonicalRecord> Store::load(const fs::path& root, const std::optional<std::string>& session) {
  std::vector<CanonicalRecord> rows;
  for (const auto& s : read_manifest(root)) {
    if (session && s.session_id != *session) continue;
    auto part = read_canonical_file(root / s.path);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

}  // namespace ward
