// ward-sentinel command line.
//
// Exit codes: 0 success, 2 bad input or usage, 1 internal failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "ward/camera_meta.hpp"
#include "ward/config.hpp"
#include "ward/csv.hpp"
#include "ward/detector.hpp"
#include "ward/errors.hpp"
#include "ward/evaluation.hpp"
#include "ward/flow.hpp"
#include "ward/ingest.hpp"
#include "ward/pipeline.hpp"
#include "ward/simulator.hpp"
#include "ward/store.hpp"
#include "ward/trends.hpp"

namespace fs = std::filesystem;
using namespace ward;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
};

PipelineConfig load_cfg(const Globals& g) { return g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path); }

fs::path out_dir(const Globals& g) {
  fs::path p(g.out_dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + p.string());
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return f;
}

// A store directory or a canonical JSONL file.
std::vector<CanonicalRecord> load_records(const fs::path& p) {
  if (fs::is_directory(p)) {
    Store::verify(p);
    return Store::load(p);
  }
  return read_canonical_file(p);
}

std::vector<LogicalState> states_of(const std::vector<CanonicalRecord>& rows) {
  std::vector<LogicalState> out;
  for (const auto& r : rows)
    if (r.logical) out.push_back(*r.logical);
  if (out.empty()) throw Error(ErrorCode::MalformedRecord, "input carries no logical states");
  return out;
}

std::map<std::string, std::vector<LogicalState>> by_session(const std::vector<LogicalState>& states) {
  std::map<std::string, std::vector<LogicalState>> m;
  for (const auto& s : states) m[s.session_id].push_back(s);
  for (auto& [sid, v] : m)
    std::stable_sort(v.begin(), v.end(), [](const LogicalState& a, const LogicalState& b) { return a.ts < b.ts; });
  return m;
}

void write_text(const fs::path& p, const std::string& text) {
  auto f = open_out(p);
  f << text << '\n';
}

// --- run ---------------------------------------------------------------

struct RunArgs {
  std::vector<std::string> inputs;
  std::string scenario;
  bool frames = false;
  unsigned threads = 1;
  bool overwrite = false;
};

int cmd_run(const Globals& g, const RunArgs& a) {
  PipelineConfig cfg = load_cfg(g);
  if (a.inputs.empty() == a.scenario.empty()) {
    throw Error(ErrorCode::InvalidArgument, "run needs exactly one of --input or --scenario");
  }
  const fs::path out = out_dir(g);
  const fs::path store_dir = out / "store";
  if (a.overwrite) fs::remove_all(store_dir);
  Store store(store_dir, cfg.utc_offset_s);

  RunSummary summary;
  std::optional<ScenarioSpec> spec;
  std::optional<SimulatedSession> sim;
  if (!a.scenario.empty()) {
    spec = load_scenario(a.scenario);
    sim = generate(*spec);
    // A scenario zone applies unless the config already names one for the session.
    if (spec->zone && !cfg.zone_for(spec->session_id)) {
      cfg.safety_zones.emplace(spec->session_id, *spec->zone);
      cfg.safety_zone_expansion = spec->zone_expansion;
    }
    SimulatorSource src(*spec, *sim, a.frames);
    SyntheticDetector det(*spec, *sim);
    summary = run_pipeline(src, det, cfg, store);
  } else {
    std::vector<SessionJob> jobs;
    for (const auto& in : a.inputs) {
      jobs.push_back({std::make_unique<CanonicalFileSource>(in), std::make_unique<ReplayDetector>()});
    }
    summary = run_sessions_parallel(std::move(jobs), cfg, store, a.threads);
  }
  store.close();
  auto f = open_out(out / "crossings.csv");
  write_crossings_csv(f, summary.crossings);
  std::cout << "records=" << summary.records << " sessions=" << summary.sessions
            << " crossings=" << summary.crossings.size() << " store=" << store_dir.string() << '\n';
  return 0;
}

// --- simulate ----------------------------------------------------------

int cmd_simulate(const Globals& g, const std::string& spec_path) {
  const ScenarioSpec spec = load_scenario(spec_path);
  const SimulatedSession sim = generate(spec);
  const fs::path out = out_dir(g);
  write_canonical_file(out / "detections.jsonl", sim.detections);
  write_canonical_file(out / "truth.jsonl", sim.truth);
  {
    auto f = open_out(out / "observation_log.csv");
    write_observation_logs(f, {sim.log});
  }
  {
    auto f = open_out(out / "crossings_truth.csv");
    write_crossings_csv(f, sim.crossings);
  }
  std::cout << "seconds=" << spec.duration_s << " alone_intervals=" << sim.log.intervals.size()
            << " crossings=" << sim.crossings.size() << '\n';
  return 0;
}

// --- trends ------------------------------------------------------------

int cmd_trends(const Globals& g, const std::string& states_path, const std::string& log_path) {
  const PipelineConfig cfg = load_cfg(g);
  const auto sessions = by_session(states_of(load_records(states_path)));
  std::map<std::string, ObservationLog> logs;
  if (!log_path.empty()) logs = read_observation_logs(log_path);

  std::vector<HourlyTrend> hourly, assisted;
  for (const auto& [sid, st] : sessions) {
    auto h = aggregate_hourly(st, cfg.utc_offset_s);
    hourly.insert(hourly.end(), h.begin(), h.end());
    if (!log_path.empty()) {
      auto it = logs.find(sid);
      const ObservationLog log = it != logs.end() ? it->second : ObservationLog{sid, {}};
      auto a = assisted_trends(st, log, cfg.utc_offset_s);
      assisted.insert(assisted.end(), a.begin(), a.end());
    }
  }
  const fs::path out = out_dir(g);
  {
    auto f = open_out(out / "hourly_trends.csv");
    write_trend_csv(f, hourly);
  }
  {
    auto f = open_out(out / "cohort_trends.csv");
    write_cohort_csv(f, cohort_average(hourly));
  }
  if (!log_path.empty()) {
    auto f = open_out(out / "assisted_trends.csv");
    write_trend_csv(f, assisted);
  }
  std::cout << "sessions=" << sessions.size() << " hourly_rows=" << hourly.size() << '\n';
  return 0;
}

// --- evaluate ----------------------------------------------------------

int cmd_eval_frames(const Globals& g, const std::string& labels, const std::string& preds) {
  const PipelineConfig cfg = load_cfg(g);
  const auto report = evaluate_frames(read_frame_labels(labels), load_records(preds), cfg);
  const fs::path out = out_dir(g);
  write_text(out / "frame_eval.json", eval_report_json(report));
  auto f = open_out(out / "frame_eval.csv");
  write_eval_csv(f, report);
  std::printf("frames=%zu excluded=%zu macro_f1=%.4f patient_f1=%.4f alone_f1=%.4f\n", report.frames_evaluated,
              report.frames_excluded, report.macro.f1, report.patient_role.scores.f1,
              report.patient_alone.scores.f1);
  return 0;
}

int cmd_eval_trends(const Globals& g, const std::string& log_path, const std::string& states_path) {
  const PipelineConfig cfg = load_cfg(g);
  const auto report = trend_accuracy(states_of(load_records(states_path)), read_observation_logs(log_path), cfg);
  const fs::path out = out_dir(g);
  write_text(out / "trend_accuracy.json", trend_accuracy_json(report));
  auto f = open_out(out / "trend_accuracy.csv");
  write_trend_accuracy_csv(f, report);
  for (const auto& s : report.summary) {
    std::printf("%-5s days=%zu accuracy=%.4f +/- %.4f (logistic %zu, manual %zu)\n",
                std::string(to_string(s.period)).c_str(), s.patient_days, s.mean, s.std, s.logistic, s.manual);
  }
  return 0;
}

// --- camera-meta -------------------------------------------------------

int cmd_camera_meta(const Globals& g, const std::string& labels, int bins) {
  const PipelineConfig cfg = load_cfg(g);
  std::vector<BedPlacementStat> stats;
  for (const auto& l : read_frame_labels(labels))
    if (auto s = bed_stats(l, cfg.analysis_dims)) stats.push_back(*s);
  const auto hist = placement_distribution(stats, bins, bins);
  const fs::path out = out_dir(g);
  {
    auto f = open_out(out / "bed_stats.csv");
    write_bed_stats_csv(f, stats);
  }
  {
    auto f = open_out(out / "bed_centroid_histogram.csv");
    write_centroid_histogram_csv(f, hist);
  }
  {
    auto f = open_out(out / "bed_area_angle.csv");
    write_area_angle_csv(f, hist);
  }
  std::cout << "beds=" << stats.size() << '\n';
  return 0;
}

// --- ingest ------------------------------------------------------------

int cmd_ingest(const Globals& g, const std::string& input, const std::string& adapter, const std::string& meta) {
  const PipelineConfig cfg = load_cfg(g);
  IngestOptions opts;
  opts.adapter = adapter;
  opts.frame_dims = cfg.analysis_dims;
  if (!meta.empty()) opts.sessions_meta = meta;
  const auto rep = ingest_external(input, out_dir(g), opts);
  std::cout << "read=" << rep.rows_read << " written=" << rep.rows_written << " rejected=" << rep.rejects.size()
            << " filtered=" << rep.rows_filtered << " output=" << rep.output.string() << '\n';
  for (const auto& r : rep.rejects) std::cerr << input << ":" << r.line << ": " << r.reason << '\n';
  return 0;
}

// --- bench flow --------------------------------------------------------

GrayImage bench_texture(std::mt19937_64& rng, Dims d, double shift_x, double shift_y) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(d.width, d.height);
  double fx[5], fy[5], ph[5];
  for (int i = 0; i < 5; ++i) {
    fx[i] = 0.05 + 0.2 * u(rng);
    fy[i] = 0.05 + 0.2 * u(rng);
    ph[i] = 6.28 * u(rng);
  }
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x) {
      double v = 128.0;
      for (int i = 0; i < 5; ++i) v += 20.0 * std::sin(fx[i] * (x - shift_x) + fy[i] * (y - shift_y) + ph[i]);
      img.at(x, y) = static_cast<float>(v);
    }
  return img;
}

int cmd_bench_flow(const Globals& g, int pairs, std::uint64_t seed) {
  const PipelineConfig cfg = load_cfg(g);
  if (pairs < 1) throw Error(ErrorCode::InvalidArgument, "--pairs must be positive");
  std::mt19937_64 rng(seed);
  const fs::path out = out_dir(g);
  auto f = open_out(out / "bench_flow.csv");
  csv::Writer w(f, "bench-flow", {"pair", "pyramid_ms", "expansion_ms", "solve_ms", "total_ms"});
  double total = 0.0, worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    std::mt19937_64 tex(rng());
    std::mt19937_64 tex2 = tex;
    const GrayImage a = bench_texture(tex, cfg.flow_dims, 0, 0);
    const GrayImage b = bench_texture(tex2, cfg.flow_dims, 2, 1);
    FlowTimings t;
    farneback_flow(a, b, cfg.flow, &t);
    w.row({std::to_string(i), csv::format_number(t.pyramid_ms, 3), csv::format_number(t.expansion_ms, 3),
           csv::format_number(t.solve_ms, 3), csv::format_number(t.total_ms, 3)});
    total += t.total_ms;
    worst = std::max(worst, t.total_ms);
  }
  std::printf("pairs=%d mean_ms=%.2f max_ms=%.2f at %dx%d\n", pairs, total / pairs, worst, cfg.flow_dims.width,
              cfg.flow_dims.height);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ward-sentinel: patient-monitoring analytics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON pipeline config")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "output directory");

  std::function<int()> action;

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run the per-second pipeline into a store");
  run->add_option("--input", run_args.inputs, "canonical JSONL to replay (repeatable)")->check(CLI::ExistingFile);
  run->add_option("--scenario", run_args.scenario, "simulator scenario to run end to end")->check(CLI::ExistingFile);
  run->add_flag("--frames", run_args.frames, "render scenario frames and compute optical flow");
  run->add_option("--threads", run_args.threads, "worker threads across input files");
  run->add_flag("--overwrite", run_args.overwrite, "replace an existing store under --out");
  run->callback([&] { action = [&] { return cmd_run(g, run_args); }; });

  std::string spec_path;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic session");
  sim->add_option("--spec", spec_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  sim->callback([&] { action = [&] { return cmd_simulate(g, spec_path); }; });

  std::string states_path, log_path;
  auto* trends = app.add_subcommand("trends", "hourly, cohort and assisted trends");
  trends->add_option("--states", states_path, "store directory or canonical JSONL with states")->required();
  trends->add_option("--log", log_path, "observation log CSV (enables assisted trends)")->check(CLI::ExistingFile);
  trends->callback([&] { action = [&] { return cmd_trends(g, states_path, log_path); }; });

  auto* eval = app.add_subcommand("evaluate", "frame or trend evaluation");
  eval->require_subcommand(1);
  std::string labels, preds;
  auto* ef = eval->add_subcommand("frames", "detection and classification metrics");
  ef->add_option("--labels", labels, "frame labels JSONL")->required()->check(CLI::ExistingFile);
  ef->add_option("--preds", preds, "store directory or canonical JSONL")->required();
  ef->callback([&] { action = [&] { return cmd_eval_frames(g, labels, preds); }; });
  auto* et = eval->add_subcommand("trends", "per-second trend accuracy against observation logs");
  et->add_option("--log", log_path, "observation log CSV")->required()->check(CLI::ExistingFile);
  et->add_option("--states", states_path, "store directory or canonical JSONL with states")->required();
  et->callback([&] { action = [&] { return cmd_eval_trends(g, log_path, states_path); }; });

  int bins = 20;
  auto* cam = app.add_subcommand("camera-meta", "bed placement statistics");
  cam->add_option("--labels", labels, "frame labels JSONL")->required()->check(CLI::ExistingFile);
  cam->add_option("--bins", bins, "centroid histogram bins per axis");
  cam->callback([&] { action = [&] { return cmd_camera_meta(g, labels, bins); }; });

  std::string input, adapter = "canonical", meta;
  auto* ing = app.add_subcommand("ingest", "convert an external export to canonical JSONL");
  ing->add_option("--input", input, "export file")->required()->check(CLI::ExistingFile);
  ing->add_option("--adapter", adapter, "canonical | counts-csv");
  ing->add_option("--sessions-meta", meta, "session metadata CSV for the 2-day filter")->check(CLI::ExistingFile);
  ing->callback([&] { action = [&] { return cmd_ingest(g, input, adapter, meta); }; });

  auto* bench = app.add_subcommand("bench", "micro benchmarks");
  bench->require_subcommand(1);
  int pairs = 20;
  std::uint64_t seed = 1;
  auto* bf = bench->add_subcommand("flow", "time dense flow on textured pairs");
  bf->add_option("--pairs", pairs, "frame pairs");
  bf->add_option("--seed", seed, "texture seed");
  bf->callback([&] { action = [&] { return cmd_bench_flow(g, pairs, seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    // A bad --config is reported even by commands that do not read it.
    if (!g.config_path.empty()) load_cfg(g);
    return action ? action() : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_validation() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
