#include "ward/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ward/errors.hpp"

namespace ward {

using nlohmann::json;

namespace {

// Uniform double in [0, 1) from the top 53 bits; std distributions are not
// reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int n) { return std::min(n - 1, static_cast<int>(uniform01(rng) * n)); }

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidSchedule, msg); }

BoundingBox box_from_json(const json& j, ObjectClass cls, const std::string& what) {
  if (!j.is_array() || j.size() != 4) bad(what + " must be [x, y, w, h]");
  for (const auto& v : j)
    if (!v.is_number()) bad(what + " must be numeric");
  return {cls, j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>(), 1.0};
}

Dims dims_from_json(const json& j, const char* key, Dims fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->size() != 2) bad(std::string(key) + " must be [w, h]");
  return {(*it)[0].get<int>(), (*it)[1].get<int>()};
}

BoundingBox at_time(const OccupantSpec& o, double dt) {
  BoundingBox b = o.box;
  b.x += o.velocity.x * dt;
  b.y += o.velocity.y * dt;
  return b;
}

bool box_inside(const BoundingBox& b, Dims d) {
  return b.x >= 0 && b.y >= 0 && b.x + b.w <= d.width && b.y + b.h <= d.height && b.w > 0 && b.h > 0;
}

Role other_role(Role r, std::mt19937_64& rng) {
  const int k = uniform_int(rng, 2);
  const int base = static_cast<int>(r);
  return static_cast<Role>((base + 1 + k) % 3);
}

}  // namespace

void ScenarioSpec::validate() const {
  if (duration_s < 1) bad("duration_s must be positive");
  if (frame_dims.width < 64 || frame_dims.height < 64) bad("frame_dims must be at least 64 px");
  if (render_dims.width < 64 || render_dims.height < 64) bad("render_dims must be at least 64 px");
  for (double p : {noise.p_miss, noise.p_spur, noise.p_role}) {
    if (!(p >= 0.0 && p < 1.0)) bad("noise rates must be in [0, 1)");
  }
  if (!(role_confidence > 0.0 && role_confidence <= 1.0)) bad("role_confidence must be in (0, 1]");
  if (!(zone_expansion >= 0.0)) bad("zone_expansion must be >= 0");
  const auto& mp = motion_patch;
  if (!(mp.x >= 0 && mp.y >= 0 && mp.w > 0 && mp.h > 0 && mp.x + mp.w <= 1.0 && mp.y + mp.h <= 1.0)) {
    bad("motion_patch must lie inside the unit square");
  }
  if (bed && !box_inside(*bed, frame_dims)) bad("bed box must lie inside the frame");
  Timestamp expect = 0;
  for (const auto& iv : schedule) {
    if (iv.start != expect) bad("schedule intervals must tile [0, duration) without gaps or overlap (at " + std::to_string(iv.start) + ")");
    if (iv.end <= iv.start) bad("empty schedule interval at " + std::to_string(iv.start));
    if (!(iv.motion_speed >= 0.0)) bad("motion speed must be >= 0");
    for (const auto& o : iv.occupants) {
      if (!box_inside(at_time(o, 0.0), frame_dims) ||
          !box_inside(at_time(o, static_cast<double>(iv.end - iv.start - 1)), frame_dims)) {
        bad("occupant " + o.id + " leaves the frame in interval starting at " + std::to_string(iv.start));
      }
    }
    expect = iv.end;
  }
  if (expect != duration_s) bad("schedule must cover exactly [0, duration_s)");
}

double ScenarioSpec::expected_scene_motion(double speed) const noexcept {
  return speed * motion_patch.w * motion_patch.h;
}

ScenarioSpec parse_scenario(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::InvalidConfig, "scenario must be a JSON object");
  ScenarioSpec s;
  try {
    s.seed = j.value("seed", std::uint64_t{1});
    s.session_id = j.value("session_id", std::string("sim"));
    s.start_ts = j.value("start_ts", Timestamp{0});
    s.duration_s = j.at("duration_s").get<int>();
    s.frame_dims = dims_from_json(j, "frame_dims", s.frame_dims);
    s.render_dims = dims_from_json(j, "render_dims", s.render_dims);
    s.zone_expansion = j.value("zone_expansion", s.zone_expansion);
    s.moving_threshold = j.value("moving_threshold", s.moving_threshold);
    s.role_confidence = j.value("role_confidence", s.role_confidence);
    if (auto it = j.find("noise"); it != j.end()) {
      s.noise.p_miss = it->value("p_miss", 0.0);
      s.noise.p_spur = it->value("p_spur", 0.0);
      s.noise.p_role = it->value("p_role", 0.0);
    }
    if (auto it = j.find("zone"); it != j.end()) {
      std::vector<Point> pts;
      for (const auto& v : *it) pts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      s.zone = Polygon(std::move(pts));
    }
    if (auto it = j.find("bed"); it != j.end()) s.bed = box_from_json(*it, ObjectClass::bed, "bed");
    if (auto it = j.find("motion_patch"); it != j.end()) s.motion_patch = box_from_json(*it, ObjectClass::person, "motion_patch");

    int auto_id = 0;
    for (const auto& iv : j.at("schedule")) {
      IntervalSpec spec;
      spec.start = iv.at("start").get<Timestamp>();
      spec.end = iv.at("end").get<Timestamp>();
      spec.motion_speed = iv.value("motion", 0.0);
      for (const auto& o : iv.value("occupants", json::array())) {
        OccupantSpec occ;
        const auto role = parse_role(o.at("role").get<std::string>());
        if (!role) bad("unknown role in occupants");
        occ.role = *role;
        occ.box = box_from_json(o.at("box"), ObjectClass::person, "occupant box");
        if (auto v = o.find("velocity"); v != o.end()) occ.velocity = {v->at(0).get<double>(), v->at(1).get<double>()};
        occ.id = o.value("id", "o" + std::to_string(auto_id++));
        spec.occupants.push_back(std::move(occ));
      }
      if (auto c = iv.find("counts"); c != iv.end()) {
        // side-by-side layout, scaled to the frame
        const double sx = s.frame_dims.width / 1088.0, sy = s.frame_dims.height / 612.0;
        int slot = static_cast<int>(spec.occupants.size());
        for (Role r : kRoles) {
          const int n = c->value(std::string(to_string(r)), 0);
          if (n < 0) bad("occupant counts must be >= 0");
          for (int k = 0; k < n; ++k, ++slot) {
            if (slot >= 8) bad("at most 8 occupants per interval");
            OccupantSpec occ;
            occ.role = r;
            occ.box = {ObjectClass::person, (40.0 + 130.0 * slot) * sx, 200.0 * sy, 100.0 * sx, 250.0 * sy, 1.0};
            occ.id = std::string(to_string(r)) + std::to_string(k);
            spec.occupants.push_back(std::move(occ));
          }
        }
      }
      s.schedule.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::optional<RoiMask> scenario_zone_mask(const ScenarioSpec& spec) {
  if (!spec.zone) return std::nullopt;
  return rasterize(expand_polygon(*spec.zone, spec.zone_expansion), spec.frame_dims.width, spec.frame_dims.height,
                   RoiKind::safety_zone);
}

SimulatedSession generate(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const auto zone = scenario_zone_mask(spec);
  const Dims fd = spec.frame_dims;

  SimulatedSession out;
  out.log.session_id = spec.session_id;
  std::map<std::string, bool> prev_in_zone;  // by occupant id, previous second only
  bool alone_open = false;
  Timestamp alone_since = 0;

  for (const auto& iv : spec.schedule) {
    const double scene = spec.expected_scene_motion(iv.motion_speed);
    for (Timestamp t = iv.start; t < iv.end; ++t) {
      const Timestamp ts = spec.start_ts + t;
      const double dt = static_cast<double>(t - iv.start);

      DetectionRecord truth{spec.session_id, ts, {}, {}};
      bool patient = false, staff = false;
      for (const auto& o : iv.occupants) {
        BoundingBox b = at_time(o, dt);
        b.confidence = 1.0;
        truth.boxes.push_back(b);
        truth.roles.push_back(RoleDistribution::from_primary(o.role, 1.0));
        patient = patient || o.role == Role::patient;
        staff = staff || o.role == Role::staff;
      }
      if (spec.bed) {
        truth.boxes.push_back(*spec.bed);
        truth.roles.emplace_back(std::nullopt);
      }

      LogicalState st;
      st.session_id = spec.session_id;
      st.ts = ts;
      const int persons = static_cast<int>(iv.occupants.size());
      st.person_alone = persons < 2;
      st.patient_alone = st.person_alone && patient;
      st.supervised_by_staff = !st.person_alone && staff;
      st.moving = scene > spec.moving_threshold;
      st.smoothed_person_count = persons;

      if (st.patient_alone && !alone_open) {
        alone_open = true;
        alone_since = ts;
      } else if (!st.patient_alone && alone_open) {
        out.log.intervals.push_back({alone_since, ts});
        alone_open = false;
      }

      if (zone) {
        std::map<std::string, bool> now;
        for (std::size_t i = 0; i < iv.occupants.size(); ++i) {
          const bool in = zone_contains(*zone, anchor_point(truth.boxes[i]));
          const auto& id = iv.occupants[i].id;
          now[id] = in;
          if (auto it = prev_in_zone.find(id); it != prev_in_zone.end() && it->second != in) {
            out.crossings.push_back({spec.session_id, ts, in ? CrossingDirection::entry : CrossingDirection::exit,
                                     static_cast<int>(i)});
          }
        }
        prev_in_zone = std::move(now);
      }

      // Noise, in a fixed draw order per second.
      DetectionRecord det{spec.session_id, ts, {}, {}};
      for (const auto& o : iv.occupants) {
        BoundingBox b = at_time(o, dt);
        const bool miss = uniform01(rng) < spec.noise.p_miss;
        const bool swap = uniform01(rng) < spec.noise.p_role;
        const Role r = swap ? other_role(o.role, rng) : o.role;
        if (miss) continue;
        b.confidence = 0.9;
        det.boxes.push_back(b);
        det.roles.push_back(RoleDistribution::from_primary(r, spec.role_confidence));
      }
      if (uniform01(rng) < spec.noise.p_spur) {
        const double w = 0.09 * fd.width, h = 0.33 * fd.height;
        const double x = uniform01(rng) * (fd.width - w);
        const double y = uniform01(rng) * (fd.height - h);
        const Role r = static_cast<Role>(uniform_int(rng, 3));
        det.boxes.push_back({ObjectClass::person, x, y, w, h, 0.6});
        det.roles.push_back(RoleDistribution::from_primary(r, spec.role_confidence));
      }
      if (spec.bed) {
        BoundingBox b = *spec.bed;
        b.confidence = 0.95;
        det.boxes.push_back(b);
        det.roles.emplace_back(std::nullopt);
      }

      MotionRecord m{spec.session_id, ts, scene, std::nullopt, std::nullopt};
      out.detections.push_back({std::move(det), m, std::nullopt});
      out.truth.push_back({std::move(truth), std::nullopt, st});
    }
  }
  if (alone_open) out.log.intervals.push_back({alone_since, spec.start_ts + spec.duration_s});
  return out;
}

FrameSynth::FrameSynth(const ScenarioSpec& spec) : spec_(spec) {
  spec.validate();
  offsets_.resize(static_cast<std::size_t>(spec.duration_s));
  double off = 0.0;
  std::size_t t = 0;
  for (const auto& iv : spec.schedule) {
    for (Timestamp s = iv.start; s < iv.end; ++s, ++t) {
      if (t > 0) off += iv.motion_speed;
      offsets_[t] = off;
    }
  }
  // Separate stream so frame texture does not shift the detection noise.
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  auto waves = [&](int n, double amp) {
    std::vector<Wave> w;
    for (int i = 0; i < n; ++i) {
      const double f = 0.08 + 0.22 * uniform01(rng);
      const double theta = 3.14159265358979323846 * uniform01(rng);
      w.push_back({f * std::cos(theta), f * std::sin(theta), 6.283185307179586 * uniform01(rng), amp});
    }
    return w;
  };
  background_ = waves(6, 14.0);
  patch_ = waves(6, 16.0);
}

Frame FrameSynth::render(int t) const {
  const int W = spec_.render_dims.width, H = spec_.render_dims.height;
  const auto& mp = spec_.motion_patch;
  const double px0 = mp.x * W, py0 = mp.y * H, px1 = (mp.x + mp.w) * W, py1 = (mp.y + mp.h) * H;
  const double off = patch_offset(t);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(W) * H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double cx = x + 0.5, cy = y + 0.5;
      const bool in_patch = cx >= px0 && cx < px1 && cy >= py0 && cy < py1;
      double v = in_patch ? 120.0 : 110.0;
      const double u = in_patch ? x - off : x;
      for (const auto& w : in_patch ? patch_ : background_) v += w.amp * std::sin(w.fx * u + w.fy * y + w.phase);
      px[static_cast<std::size_t>(y) * W + x] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return Frame(spec_.session_id, spec_.start_ts + t, W, H, FrameMode::NIR, std::move(px));
}

}  // namespace ward
