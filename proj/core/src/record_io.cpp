#include "ward/record_io.hpp"

#include "json.hpp"
#include "ward/errors.hpp"

namespace ward {

using nlohmann::json;

namespace {

json box_json(const BoundingBox& b) {
  return {{"cls", to_string(b.cls)}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"conf", b.confidence}};
}

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::MalformedRecord, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::MalformedRecord, std::string("bad type for field '") + key + "'");
  }
}

std::optional<double> opt_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw Error(ErrorCode::MalformedRecord, std::string("bad type for field '") + key + "'");
  return it->get<double>();
}

}  // namespace

std::string schema_header(std::string_view kind) {
  json j{{"schema", "ward-sentinel/" + std::string(kind)}, {"schema_version", kSchemaVersion}};
  return j.dump();
}

bool is_schema_header(std::string_view line) {
  if (line.find("\"schema_version\"") == std::string_view::npos) return false;
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("schema_version") || j.contains("ts")) return false;
  if (j["schema_version"] != kSchemaVersion) {
    throw Error(ErrorCode::SchemaMismatch, "unsupported schema version " + j["schema_version"].dump());
  }
  return true;
}

std::string to_json_line(const DetectionRecord& rec) { return to_json_line(CanonicalRecord{rec, {}, {}}); }

std::string to_json_line(const CanonicalRecord& rec) {
  const auto& d = rec.detection;
  json j;
  j["session_id"] = d.session_id;
  j["ts"] = d.ts;
  json boxes = json::array();
  for (const auto& b : d.boxes) boxes.push_back(box_json(b));
  j["boxes"] = std::move(boxes);
  json roles = json::array();
  for (const auto& r : d.roles) {
    if (r) {
      roles.push_back({{"patient", r->score(Role::patient)},
                       {"staff", r->score(Role::staff)},
                       {"other", r->score(Role::other)}});
    } else {
      roles.push_back(nullptr);
    }
  }
  j["roles"] = std::move(roles);
  if (rec.motion) {
    json m = json::object();
    if (rec.motion->scene) m["scene"] = *rec.motion->scene;
    if (rec.motion->bed) m["bed"] = *rec.motion->bed;
    if (rec.motion->safety_zone) m["safety_zone"] = *rec.motion->safety_zone;
    j["motion"] = std::move(m);
  }
  if (rec.logical) {
    j["logical"] = {{"person_alone", rec.logical->person_alone},
                    {"patient_alone", rec.logical->patient_alone},
                    {"supervised_by_staff", rec.logical->supervised_by_staff},
                    {"moving", rec.logical->moving},
                    {"smoothed_person_count", rec.logical->smoothed_person_count}};
  }
  return j.dump();
}

CanonicalRecord parse_canonical_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::MalformedRecord, "line is not a JSON object");

  CanonicalRecord out;
  auto& d = out.detection;
  d.session_id = field<std::string>(j, "session_id");
  d.ts = field<Timestamp>(j, "ts");
  const json boxes = j.value("boxes", json::array());
  if (!boxes.is_array()) throw Error(ErrorCode::MalformedRecord, "'boxes' must be a list");
  for (const auto& b : boxes) {
    const auto cls_name = field<std::string>(b, "cls");
    const auto cls = parse_object_class(cls_name);
    if (!cls) throw Error(ErrorCode::MalformedRecord, "unknown class '" + cls_name + "'");
    d.boxes.push_back({*cls, field<double>(b, "x"), field<double>(b, "y"), field<double>(b, "w"),
                       field<double>(b, "h"), b.contains("conf") ? field<double>(b, "conf") : 1.0});
  }
  const json roles = j.value("roles", json::array());
  if (!roles.is_array()) throw Error(ErrorCode::MalformedRecord, "'roles' must be a list");
  for (const auto& r : roles) {
    if (r.is_null()) {
      d.roles.emplace_back(std::nullopt);
    } else {
      d.roles.emplace_back(RoleDistribution::from_scores(field<double>(r, "patient"), field<double>(r, "staff"),
                                                         field<double>(r, "other")));
    }
  }
  if (auto it = j.find("motion"); it != j.end() && !it->is_null()) {
    MotionRecord m{d.session_id, d.ts, opt_number(*it, "scene"), opt_number(*it, "bed"),
                   opt_number(*it, "safety_zone")};
    out.motion = m;
  }
  if (auto it = j.find("logical"); it != j.end() && !it->is_null()) {
    LogicalState s;
    s.session_id = d.session_id;
    s.ts = d.ts;
    s.person_alone = field<bool>(*it, "person_alone");
    s.patient_alone = field<bool>(*it, "patient_alone");
    s.supervised_by_staff = field<bool>(*it, "supervised_by_staff");
    s.moving = field<bool>(*it, "moving");
    if (auto c = it->find("smoothed_person_count"); c != it->end()) {
      if (!c->is_number()) throw Error(ErrorCode::MalformedRecord, "bad type for field 'smoothed_person_count'");
      s.smoothed_person_count = c->get<double>();
    }
    out.logical = s;
  }
  return out;
}

CanonicalReader::CanonicalReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw Error(ErrorCode::Io, "cannot open " + path.string());
}

std::optional<CanonicalRecord> CanonicalReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (is_schema_header(line)) continue;
    try {
      return parse_canonical_line(line);
    } catch (const Error& e) {
      throw Error(e.code(), path_.string() + ":" + std::to_string(line_no_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::vector<CanonicalRecord> read_canonical_file(const std::filesystem::path& path) {
  CanonicalReader reader(path);
  std::vector<CanonicalRecord> rows;
  while (auto r = reader.next()) rows.push_back(std::move(*r));
  return rows;
}

void write_canonical_file(const std::filesystem::path& path, const std::vector<CanonicalRecord>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << schema_header("canonical") << '\n';
  for (const auto& r : rows) out << to_json_line(r) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace ward
