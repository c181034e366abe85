#include "ward/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "ward/csv.hpp"
#include "ward/errors.hpp"
#include "ward/record_io.hpp"
#include "ward/validate.hpp"

namespace ward {

namespace fs = std::filesystem;

namespace {

template <typename T>
T parse_num(const std::string& s, const char* what) {
  T v{};
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) throw Error(ErrorCode::MalformedRecord, std::string("bad ") + what + " '" + s + "'");
  return v;
}

std::optional<double> parse_opt_double(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  const double v = parse_num<double>(s, what);
  if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::MalformedRecord, std::string(what) + " must be finite and >= 0");
  return v;
}

// Placeholder layout: 60 px wide columns, wrapping onto new rows.
BoundingBox placeholder_box(int k, Dims d) {
  const int per_row = std::max(1, (d.width - 10) / 60);
  const int col = k % per_row, row = k / per_row;
  return {ObjectClass::person, 10.0 + 60.0 * col, 10.0 + 110.0 * row, 50.0, 100.0, 1.0};
}

struct Accepted {
  std::vector<CanonicalRecord> rows;
  std::vector<IngestReject> rejects;
  std::size_t read = 0;
};

void accept(Accepted& acc, RecordValidator& validator, CanonicalRecord rec, std::size_t line) {
  try {
    rec.detection = validator.validate(rec.detection);
    if (rec.motion) {
      rec.motion->session_id = rec.detection.session_id;
      rec.motion->ts = rec.detection.ts;
    }
    acc.rows.push_back(std::move(rec));
  } catch (const Error& e) {
    acc.rejects.push_back({line, e.what()});
  }
}

Accepted read_canonical(const fs::path& input, Dims dims) {
  std::ifstream in(input);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + input.string());
  Accepted acc;
  RecordValidator validator(dims);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos || is_schema_header(line)) continue;
    ++acc.read;
    try {
      accept(acc, validator, parse_canonical_line(line), n);
    } catch (const Error& e) {
      acc.rejects.push_back({n, e.what()});
    }
  }
  return acc;
}

Accepted read_counts_csv(const fs::path& input, Dims dims) {
  const csv::Table t = csv::read(input);
  auto col = [&](const char* name) { return t.column(name); };
  const auto c_sid = col("session_id"), c_ts = col("ts"), c_n = col("person_count");
  if (!c_sid || !c_ts || !c_n) {
    throw Error(ErrorCode::SchemaMismatch, input.string() + ": counts-csv needs session_id, ts and person_count");
  }
  const std::array<std::optional<std::size_t>, 3> c_role{col("patient_count"), col("staff_count"), col("other_count")};
  const bool roles = c_role[0] || c_role[1] || c_role[2];
  if (roles && !(c_role[0] && c_role[1] && c_role[2])) {
    throw Error(ErrorCode::SchemaMismatch, input.string() + ": role columns must be given together");
  }
  const auto c_scene = col("scene_motion"), c_bed = col("bed_motion"), c_zone = col("zone_motion");

  Accepted acc;
  RecordValidator validator(dims);
  for (const auto& row : t.rows) {
    ++acc.read;
    try {
      if (row.cells.size() != t.header.size()) {
        throw Error(ErrorCode::MalformedRecord, "expected " + std::to_string(t.header.size()) + " fields, got " +
                                                    std::to_string(row.cells.size()));
      }
      CanonicalRecord rec;
      auto& d = rec.detection;
      d.session_id = row.cells[*c_sid];
      if (d.session_id.empty()) throw Error(ErrorCode::MalformedRecord, "empty session_id");
      d.ts = parse_num<Timestamp>(row.cells[*c_ts], "ts");
      const int persons = parse_num<int>(row.cells[*c_n], "person_count");
      if (persons < 0) throw Error(ErrorCode::MalformedRecord, "person_count < 0");
      std::vector<Role> role_of;
      if (roles) {
        int total = 0;
        for (Role r : kRoles) {
          const int k = parse_num<int>(row.cells[*c_role[static_cast<std::size_t>(r)]], "role count");
          if (k < 0) throw Error(ErrorCode::MalformedRecord, "role count < 0");
          total += k;
          role_of.insert(role_of.end(), static_cast<std::size_t>(k), r);
        }
        if (total != persons) throw Error(ErrorCode::MalformedRecord, "role counts do not sum to person_count");
      }
      for (int k = 0; k < persons; ++k) {
        d.boxes.push_back(placeholder_box(k, dims));
        d.roles.push_back(roles ? RoleDistribution::from_primary(role_of[k], 1.0) : RoleDistribution::uniform());
      }
      MotionRecord m{d.session_id, d.ts, std::nullopt, std::nullopt, std::nullopt};
      if (c_scene) m.scene = parse_opt_double(row.cells[*c_scene], "scene_motion");
      if (c_bed) m.bed = parse_opt_double(row.cells[*c_bed], "bed_motion");
      if (c_zone) m.safety_zone = parse_opt_double(row.cells[*c_zone], "zone_motion");
      if (m.scene || m.bed || m.safety_zone) rec.motion = m;
      accept(acc, validator, std::move(rec), row.line);
    } catch (const Error& e) {
      acc.rejects.push_back({row.line, e.what()});
    }
  }
  return acc;
}

}  // namespace

std::vector<std::string> known_adapters() { return {"canonical", "counts-csv"}; }

std::vector<SessionMeta> read_session_meta(const fs::path& path) {
  const csv::Table t = csv::read(path);
  std::vector<std::size_t> idx;
  for (const char* name : {"session_id", "hospital_id", "hospital_size", "age_bucket", "gender", "start_ts", "end_ts"}) {
    auto c = t.column(name);
    if (!c) throw Error(ErrorCode::SchemaMismatch, path.string() + ": missing column " + name);
    idx.push_back(*c);
  }
  std::vector<SessionMeta> out;
  for (const auto& row : t.rows) {
    try {
      if (row.cells.size() != t.header.size()) throw Error(ErrorCode::MalformedRecord, "wrong field count");
      SessionMeta m;
      m.session_id = row.cells[idx[0]];
      m.hospital_id = row.cells[idx[1]];
      const auto size = parse_hospital_size(row.cells[idx[2]]);
      if (!size) throw Error(ErrorCode::MalformedRecord, "unknown hospital size '" + row.cells[idx[2]] + "'");
      m.hospital_size_bucket = *size;
      m.age_bucket = row.cells[idx[3]];
      m.gender = row.cells[idx[4]];
      m.start_ts = parse_num<Timestamp>(row.cells[idx[5]], "start_ts");
      m.end_ts = parse_num<Timestamp>(row.cells[idx[6]], "end_ts");
      validate_session_meta(m);
      out.push_back(std::move(m));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(row.line) + ": " + e.what());
    }
  }
  return out;
}

IngestReport ingest_external(const fs::path& input, const fs::path& out_dir, const IngestOptions& opts) {
  Accepted acc;
  if (opts.adapter == "canonical") {
    acc = read_canonical(input, opts.frame_dims);
  } else if (opts.adapter == "counts-csv") {
    acc = read_counts_csv(input, opts.frame_dims);
  } else {
    throw Error(ErrorCode::UnknownAdapter, "unknown adapter '" + opts.adapter + "'");
  }

  IngestReport rep;
  rep.rows_read = acc.read;
  rep.rejects = std::move(acc.rejects);

  std::optional<std::set<std::string>> keep;
  if (opts.sessions_meta) {
    keep.emplace();
    for (const auto& m : read_session_meta(*opts.sessions_meta))
      if (meets_minimum_duration(m, opts.min_days)) keep->insert(m.session_id);
  }
  std::vector<CanonicalRecord> rows;
  for (auto& r : acc.rows) {
    if (keep && !keep->count(r.detection.session_id)) {
      ++rep.rows_filtered;
      continue;
    }
    rows.push_back(std::move(r));
  }
  rep.rows_written = rows.size();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string());
  const std::string stem = input.stem().string();
  rep.output = out_dir / (stem + ".canonical.jsonl");
  rep.rejects_file = out_dir / (stem + ".rejects.csv");
  write_canonical_file(rep.output, rows);
  std::ofstream rj(rep.rejects_file, std::ios::binary | std::ios::trunc);
  csv::Writer w(rj, "ingest-rejects", {"line", "reason"});
  for (const auto& r : rep.rejects) w.row({std::to_string(r.line), r.reason});
  if (!rj) throw Error(ErrorCode::Io, "cannot write " + rep.rejects_file.string());
  return rep;
}

}  // namespace ward
