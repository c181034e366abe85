#include "ward/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "json.hpp"
#include "ward/csv.hpp"
#include "ward/errors.hpp"
#include "ward/logistic.hpp"
#include "ward/timeutil.hpp"

namespace ward {

using nlohmann::json;

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match_boxes(std::span<const BoundingBox> preds, std::span<const BoundingBox> gts, double iou_threshold) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].confidence > preds[b].confidence; });
  std::vector<bool> taken(gts.size(), false);
  MatchResult r;
  for (std::size_t p : order) {
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(preds[p], gts[g]);
      if (v >= iou_threshold && (!best || v > best_iou)) {
        best = g;
        best_iou = v;
      }
    }
    if (best) {
      taken[*best] = true;
      r.pairs.emplace_back(p, *best);
      ++r.tp;
    } else {
      ++r.fp;
    }
  }
  r.fn = gts.size() - r.tp;
  return r;
}

Prf1 prf1(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
  Prf1 m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

void ClassMetrics::add(std::size_t tp_, std::size_t fp_, std::size_t fn_) noexcept {
  tp += tp_;
  fp += fp_;
  fn += fn_;
}

bool FrameLabel::patient_alone() const noexcept {
  int persons = 0;
  bool patient = false;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].cls != ObjectClass::person) continue;
    ++persons;
    if (i < roles.size() && roles[i] == Role::patient) patient = true;
  }
  return persons < 2 && patient;
}

namespace {

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

using FrameKey = std::pair<std::string, Timestamp>;

bool pred_alone(const CanonicalRecord& r) {
  if (r.logical) return r.logical->patient_alone;
  const auto& d = r.detection;
  return d.person_count() < 2 && d.has_role(Role::patient);
}

json metrics_json(const ClassMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"precision", m.scores.precision},
          {"recall", m.scores.recall},
          {"f1", m.scores.f1}};
}

}  // namespace

FrameLabel parse_frame_label_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::MalformedRecord, "label line is not a JSON object");
  FrameLabel l;
  l.session_id = field<std::string>(j, "session_id");
  l.ts = field<Timestamp>(j, "ts");
  for (const auto& b : j.value("boxes", json::array())) {
    const auto name = field<std::string>(b, "cls");
    const auto cls = parse_object_class(name);
    if (!cls) throw Error(ErrorCode::MalformedRecord, "unknown class '" + name + "'");
    l.boxes.push_back({*cls, field<double>(b, "x"), field<double>(b, "y"), field<double>(b, "w"),
                       field<double>(b, "h"), b.contains("conf") ? field<double>(b, "conf") : 1.0});
  }
  for (const auto& r : j.value("roles", json::array())) {
    if (r.is_null()) {
      l.roles.emplace_back(std::nullopt);
      continue;
    }
    if (!r.is_string()) throw Error(ErrorCode::MalformedRecord, "label roles must be role names or null");
    const auto role = parse_role(r.get<std::string>());
    if (!role) throw Error(ErrorCode::MalformedRecord, "unknown role '" + r.get<std::string>() + "'");
    l.roles.emplace_back(*role);
  }
  if (l.roles.empty() && !l.boxes.empty()) l.roles.resize(l.boxes.size());
  if (l.roles.size() != l.boxes.size()) throw Error(ErrorCode::MalformedRecord, "roles and boxes differ in length");
  for (std::size_t i = 0; i < l.boxes.size(); ++i) {
    if (l.roles[i] && l.boxes[i].cls != ObjectClass::person) {
      throw Error(ErrorCode::MalformedRecord, "role given for a non-person box");
    }
  }
  if (auto it = j.find("scene"); it != j.end() && !it->is_null()) {
    const auto s = it->get<std::string>();
    if (s == "in_bed") l.scene = SceneTag::in_bed;
    else if (s == "not_in_bed") l.scene = SceneTag::not_in_bed;
    else throw Error(ErrorCode::MalformedRecord, "unknown scene tag '" + s + "'");
  }
  l.exception = j.value("exception", false);
  return l;
}

std::string to_json_line(const FrameLabel& l) {
  json j;
  j["session_id"] = l.session_id;
  j["ts"] = l.ts;
  json boxes = json::array();
  for (const auto& b : l.boxes) {
    boxes.push_back({{"cls", to_string(b.cls)}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"conf", b.confidence}});
  }
  j["boxes"] = std::move(boxes);
  json roles = json::array();
  for (const auto& r : l.roles) roles.push_back(r ? json(std::string(to_string(*r))) : json(nullptr));
  j["roles"] = std::move(roles);
  if (l.scene) j["scene"] = *l.scene == SceneTag::in_bed ? "in_bed" : "not_in_bed";
  j["exception"] = l.exception;
  return j.dump();
}

std::vector<FrameLabel> read_frame_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<FrameLabel> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos || is_schema_header(line)) continue;
    try {
      out.push_back(parse_frame_label_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

EvalReport evaluate_frames(std::span<const FrameLabel> labels, std::span<const CanonicalRecord> preds,
                           const PipelineConfig& cfg) {
  std::map<FrameKey, const CanonicalRecord*> by_key;
  for (const auto& p : preds) by_key[{p.detection.session_id, p.detection.ts}] = &p;

  EvalReport rep;
  for (const auto& label : labels) {
    if (cfg.exclude_exception_frames && label.exception) {
      ++rep.frames_excluded;
      continue;
    }
    auto it = by_key.find({label.session_id, label.ts});
    if (it == by_key.end()) {
      throw Error(ErrorCode::MisalignedFrames,
                  "no prediction for " + label.session_id + " at ts " + std::to_string(label.ts));
    }
    const DetectionRecord& pred = it->second->detection;
    ++rep.frames_evaluated;

    for (ObjectClass cls : kObjectClasses) {
      std::vector<BoundingBox> p, g;
      for (const auto& b : pred.boxes)
        if (b.cls == cls) p.push_back(b);
      for (const auto& b : label.boxes)
        if (b.cls == cls) g.push_back(b);
      const auto m = match_boxes(p, g, cfg.iou_threshold);
      rep.per_class[static_cast<std::size_t>(cls)].add(m.tp, m.fp, m.fn);
    }

    std::vector<BoundingBox> pp, gp;
    for (std::size_t i = 0; i < pred.boxes.size(); ++i) {
      if (pred.boxes[i].cls == ObjectClass::person && i < pred.roles.size() && pred.roles[i] &&
          pred.roles[i]->argmax() == Role::patient) {
        pp.push_back(pred.boxes[i]);
      }
    }
    for (std::size_t i = 0; i < label.boxes.size(); ++i) {
      if (label.boxes[i].cls == ObjectClass::person && label.roles[i] == Role::patient) gp.push_back(label.boxes[i]);
    }
    const auto m = match_boxes(pp, gp, cfg.iou_threshold);
    rep.patient_role.add(m.tp, m.fp, m.fn);

    const bool truth = label.patient_alone();
    const bool guess = pred_alone(*it->second);
    rep.patient_alone.add(truth && guess, !truth && guess, truth && !guess);
  }

  for (auto& c : rep.per_class) {
    c.finish();
    rep.macro.precision += c.scores.precision / 3.0;
    rep.macro.recall += c.scores.recall / 3.0;
    rep.macro.f1 += c.scores.f1 / 3.0;
  }
  rep.patient_role.finish();
  rep.patient_alone.finish();
  return rep;
}

ClassMetrics eval_patient_alone(std::span<const LogicalState> preds, std::span<const FrameLabel> labels) {
  std::map<FrameKey, bool> by_key;
  for (const auto& s : preds) by_key[{s.session_id, s.ts}] = s.patient_alone;
  ClassMetrics m;
  for (const auto& label : labels) {
    auto it = by_key.find({label.session_id, label.ts});
    if (it == by_key.end()) {
      throw Error(ErrorCode::MisalignedFrames,
                  "no state for " + label.session_id + " at ts " + std::to_string(label.ts));
    }
    const bool truth = label.patient_alone();
    m.add(truth && it->second, !truth && it->second, truth && !it->second);
  }
  m.finish();
  return m;
}

std::string eval_report_json(const EvalReport& r) {
  json j;
  j["schema"] = "ward-sentinel/frame-eval";
  j["schema_version"] = kSchemaVersion;
  json classes = json::object();
  for (ObjectClass c : kObjectClasses) classes[std::string(to_string(c))] = metrics_json(r.per_class[static_cast<std::size_t>(c)]);
  j["per_class"] = std::move(classes);
  j["macro"] = {{"precision", r.macro.precision}, {"recall", r.macro.recall}, {"f1", r.macro.f1}};
  j["patient_role"] = metrics_json(r.patient_role);
  j["patient_alone"] = metrics_json(r.patient_alone);
  j["frames_evaluated"] = r.frames_evaluated;
  j["frames_excluded"] = r.frames_excluded;
  return j.dump(2);
}

void write_eval_csv(std::ostream& out, const EvalReport& r) {
  csv::Writer w(out, "frame-eval", {"metric", "tp", "fp", "fn", "precision", "recall", "f1"});
  auto row = [&](const std::string& name, const ClassMetrics& m) {
    w.row({name, std::to_string(m.tp), std::to_string(m.fp), std::to_string(m.fn),
           csv::format_number(m.scores.precision), csv::format_number(m.scores.recall),
           csv::format_number(m.scores.f1)});
  };
  for (ObjectClass c : kObjectClasses) row(std::string(to_string(c)), r.per_class[static_cast<std::size_t>(c)]);
  w.row({"macro", "", "", "", csv::format_number(r.macro.precision), csv::format_number(r.macro.recall),
         csv::format_number(r.macro.f1)});
  row("patient_role", r.patient_role);
  row("patient_alone", r.patient_alone);
}

std::string_view to_string(Period p) noexcept {
  switch (p) {
    case Period::day: return "day";
    case Period::night: return "night";
    case Period::full: return "full";
  }
  return "?";
}

bool in_day_period(int hour, const PipelineConfig& cfg) noexcept {
  if (cfg.day_start_hour < cfg.night_start_hour) return hour >= cfg.day_start_hour && hour < cfg.night_start_hour;
  return hour >= cfg.day_start_hour || hour < cfg.night_start_hour;
}

TrendAccuracyReport trend_accuracy(std::span<const LogicalState> states,
                                   const std::map<std::string, ObservationLog>& logs, const PipelineConfig& cfg) {
  std::map<std::string, std::vector<LogicalState>> by_session;
  for (const auto& s : states) by_session[s.session_id].push_back(s);

  // (session, day, period) -> (x, y)
  std::map<std::tuple<std::string, long long, int>, std::pair<std::vector<bool>, std::vector<bool>>> series;
  for (const auto& [sid, log] : logs) {
    auto it = by_session.find(sid);
    if (it == by_session.end() || it->second.empty()) {
      throw Error(ErrorCode::NoOverlap, "no states for logged session " + sid);
    }
    auto& ss = it->second;
    std::stable_sort(ss.begin(), ss.end(), [](const LogicalState& a, const LogicalState& b) { return a.ts < b.ts; });
    const SecondGrid grid = covering_grid(ss, log);
    const std::vector<bool> truth = log_to_states(log, grid);
    for (const auto& s : ss) {
      const bool y = truth[static_cast<std::size_t>(s.ts - grid.start)];
      const long long day = local_day_index(s.ts, cfg.utc_offset_s);
      const int hour = clock_position(s.ts, cfg.utc_offset_s).hour;
      const Period p = in_day_period(hour, cfg) ? Period::day : Period::night;
      for (Period q : {p, Period::full}) {
        auto& xy = series[{sid, day, static_cast<int>(q)}];
        xy.first.push_back(s.patient_alone);
        xy.second.push_back(y);
      }
    }
  }
  if (series.empty()) throw Error(ErrorCode::NoOverlap, "no logged session has states");

  TrendAccuracyReport rep;
  std::array<std::vector<double>, 3> acc_by_period;
  for (auto& [key, xy] : series) {
    const auto& [sid, day, pi] = key;
    TrendAccuracyRow row{sid, format_date(day), static_cast<Period>(pi), "logistic", 0.0, xy.first.size()};
    try {
      row.accuracy = fit_logistic(xy.first, xy.second).accuracy;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingleClassTarget) throw;
      row.method = "manual";
      row.accuracy = manual_accuracy(xy.first, xy.second);
    }
    acc_by_period[pi].push_back(row.accuracy);
    auto& sum = rep.summary[pi];
    (row.method == "logistic" ? sum.logistic : sum.manual)++;
    rep.rows.push_back(std::move(row));
  }
  for (int pi = 0; pi < 3; ++pi) {
    auto& sum = rep.summary[pi];
    sum.period = static_cast<Period>(pi);
    const auto& v = acc_by_period[pi];
    sum.patient_days = v.size();
    if (v.empty()) continue;
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - mean) * (a - mean);
    sum.mean = mean;
    sum.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return rep;
}

std::string trend_accuracy_json(const TrendAccuracyReport& r) {
  json j;
  j["schema"] = "ward-sentinel/trend-accuracy";
  j["schema_version"] = kSchemaVersion;
  json periods = json::object();
  for (const auto& s : r.summary) {
    periods[std::string(to_string(s.period))] = {{"patient_days", s.patient_days}, {"mean", s.mean}, {"std", s.std},
                                                 {"logistic", s.logistic},         {"manual", s.manual}};
  }
  j["periods"] = std::move(periods);
  return j.dump(2);
}

void write_trend_accuracy_csv(std::ostream& out, const TrendAccuracyReport& r) {
  csv::Writer w(out, "trend-accuracy", {"session_id", "date", "period", "method", "accuracy", "seconds"});
  for (const auto& row : r.rows) {
    w.row({row.session_id, row.date, std::string(to_string(row.period)), row.method,
           csv::format_number(row.accuracy, 9), std::to_string(row.seconds)});
  }
}

}  // namespace ward
