#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "ward/csv.hpp"
#include "ward/errors.hpp"
#include "ward/ingest.hpp"
#include "ward/pipeline.hpp"
#include "ward/preprocess.hpp"
#include "ward/simulator.hpp"
#include "ward/store.hpp"

using namespace ward;
namespace fs = std::filesystem;

namespace {

constexpr Timestamp kDay = 1699920000;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(WARD_TEST_TMP) / "io" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

CanonicalRecord make_rec(const std::string& sid, Timestamp ts, int persons, Role role = Role::patient) {
  CanonicalRecord r;
  r.detection.session_id = sid;
  r.detection.ts = ts;
  for (int i = 0; i < persons; ++i) {
    r.detection.boxes.push_back({ObjectClass::person, 10.0 + 60 * i, 20, 50, 100, 0.875});
    r.detection.roles.push_back(RoleDistribution::from_primary(i == 0 ? role : Role::staff, 0.9));
  }
  r.motion = MotionRecord{sid, ts, 0.1 * (ts % 7), std::nullopt, std::nullopt};
  return r;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RecordIo, RoundTrip) {
  auto r = make_rec("s", 5, 2);
  r.detection.boxes.push_back({ObjectClass::bed, 1.25, 2.5, 300, 150.125, 0.95});
  r.detection.roles.push_back(std::nullopt);
  r.motion->bed = 0.3333333333333333;
  r.logical = LogicalState{"s", 5, false, false, true, true, 1.8};
  const auto back = parse_canonical_line(to_json_line(r));
  EXPECT_EQ(back, r);

  const fs::path p = fresh_dir("roundtrip.jsonl");
  write_canonical_file(p, {r, make_rec("s", 6, 1)});
  const auto rows = read_canonical_file(p);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], r);
  EXPECT_EQ(read_text(p).rfind("{\"schema\":\"ward-sentinel/", 0), 0u);
}

TEST(RecordIo, MalformedLines) {
  EXPECT_EQ(code_of([] { parse_canonical_line("not json"); }), ErrorCode::MalformedRecord);
  EXPECT_EQ(code_of([] { parse_canonical_line(R"({"session_id":"s"})"); }), ErrorCode::MalformedRecord);
  EXPECT_EQ(code_of([] { is_schema_header(R"({"schema":"ward-sentinel/records","schema_version":99})"); }),
            ErrorCode::SchemaMismatch);
}

TEST(Csv, QuotingAndComments) {
  EXPECT_EQ(csv::split_line(R"(a,"b,c","d""e",)"), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
  EXPECT_EQ(csv::escape("x,y"), "\"x,y\"");
  const auto t = csv::parse("# note\nh1,h2\n\n1,2\n3,4\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"h1", "h2"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1].line, 5u);
  EXPECT_EQ(t.column("h2"), 1u);
  std::ostringstream os;
  csv::Writer w(os, "k", {"a", "b"}, {"n1"});
  w.row({"1", "x,y"});
  EXPECT_EQ(os.str(), "# schema=ward-sentinel/k schema_version=1\n# n1\na,b\n1,\"x,y\"\n");
}

TEST(StoreTest, SegmentsVerifyAndLoad) {
  const fs::path root = fresh_dir("store_a");
  std::vector<CanonicalRecord> in;
  // crosses midnight and the segment size
  for (Timestamp t = kDay - 150; t < kDay + 100; ++t) in.push_back(make_rec("s1", t, 1));
  {
    Store st(root, 0, 100);
    for (const auto& r : in) st.append(r);
    st.append(make_rec("s2", kDay, 1));
    st.close();
  }
  const auto segs = Store::verify(root);
  // s1: 2023-11-13 has 150 rows (100 + 50), 2023-11-14 has 100; s2: 1
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_EQ(segs[0].path, "s1/2023-11-13/part-0000.jsonl");
  EXPECT_EQ(segs[1].rows, 50u);
  EXPECT_EQ(segs[2].date, "2023-11-14");
  EXPECT_EQ(Store::load(root, std::string("s1")), in);
  EXPECT_EQ(Store::load(root).size(), in.size() + 1);
  EXPECT_EQ(code_of([&] { Store again(root); }), ErrorCode::InvalidArgument);

  // flip one byte of a sealed segment
  const fs::path seg = root / segs[1].path;
  std::string text = read_text(seg);
  text[text.size() / 2] ^= 1;
  write_text(seg, text);
  EXPECT_EQ(code_of([&] { Store::verify(root); }), ErrorCode::StoreCorrupt);
}

TEST(StoreTest, RejectsBadInput) {
  Store st(fresh_dir("store_b"));
  st.append(make_rec("s", 10, 1));
  EXPECT_EQ(code_of([&] { st.append(make_rec("s", 10, 1)); }), ErrorCode::OutOfOrderRecord);
  EXPECT_EQ(code_of([&] { st.append(make_rec("../x", 11, 1)); }), ErrorCode::MalformedRecord);
  st.close();
}

TEST(Ingest, CountsCsv) {
  const fs::path dir = fresh_dir("ingest_counts");
  fs::create_directories(dir);
  write_text(dir / "ext.csv",
             "session_id,ts,person_count,patient_count,staff_count,other_count,scene_motion\n"
             "a,100,1,1,0,0,0.2\n"
             "a,101,2,1,1,0,\n"
             "a,102,-1,0,0,0,0\n"
             "a,103,2,1,0,0,0\n"
             "a,101,1,1,0,0,0\n"
             "a,104,0,0,0,0,1.5\n");
  IngestOptions opts;
  opts.adapter = "counts-csv";
  const auto rep = ingest_external(dir / "ext.csv", dir / "out", opts);
  EXPECT_EQ(rep.rows_read, 6u);
  EXPECT_EQ(rep.rows_written, 3u);
  ASSERT_EQ(rep.rejects.size(), 3u);
  EXPECT_EQ(rep.rejects[0].line, 4u);
  EXPECT_EQ(rep.rejects[1].line, 5u);
  EXPECT_EQ(rep.rejects[2].line, 6u);
  const auto rows = read_canonical_file(rep.output);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].detection.person_count(), 2);
  EXPECT_TRUE(rows[1].detection.has_role(Role::staff));
  EXPECT_FALSE(rows[1].motion.has_value());
  EXPECT_DOUBLE_EQ(*rows[2].motion->scene, 1.5);

  // canonical re-ingest of the output is a fixed point
  const auto again = ingest_external(rep.output, dir / "out2", IngestOptions{});
  EXPECT_TRUE(again.rejects.empty());
  EXPECT_EQ(read_canonical_file(again.output), rows);
}

TEST(Ingest, AdapterAndSchemaErrors) {
  const fs::path dir = fresh_dir("ingest_err");
  fs::create_directories(dir);
  write_text(dir / "x.csv", "session_id,ts\na,1\n");
  IngestOptions opts;
  opts.adapter = "counts-csv";
  EXPECT_EQ(code_of([&] { ingest_external(dir / "x.csv", dir / "o", opts); }), ErrorCode::SchemaMismatch);
  write_text(dir / "y.csv", "session_id,ts,person_count,patient_count\na,1,1,1\n");
  EXPECT_EQ(code_of([&] { ingest_external(dir / "y.csv", dir / "o", opts); }), ErrorCode::SchemaMismatch);
  opts.adapter = "pixels";
  EXPECT_EQ(code_of([&] { ingest_external(dir / "x.csv", dir / "o", opts); }), ErrorCode::UnknownAdapter);
}

TEST(Ingest, SessionDurationFilter) {
  const fs::path dir = fresh_dir("ingest_meta");
  fs::create_directories(dir);
  write_text(dir / "meta.csv",
             "session_id,hospital_id,hospital_size,age_bucket,gender,start_ts,end_ts\n"
             "long,h1,small,70-79,f,0,259200\n"
             "short,h1,large,60-69,m,0,86400\n");
  write_canonical_file(dir / "in.jsonl", {make_rec("long", 1, 1), make_rec("short", 1, 1), make_rec("long", 2, 1)});
  IngestOptions opts;
  opts.sessions_meta = dir / "meta.csv";
  const auto rep = ingest_external(dir / "in.jsonl", dir / "out", opts);
  EXPECT_EQ(rep.rows_written, 2u);
  EXPECT_EQ(rep.rows_filtered, 1u);
}

TEST(Preprocess, SizesAndMinimum) {
  PipelineConfig cfg;
  const Frame f("s", 1, 1920, 1080, FrameMode::RGB, std::vector<std::uint8_t>(1920 * 1080 * 3, 128));
  const auto p = preprocess(f, cfg);
  EXPECT_EQ(p.analysis.dims(), cfg.analysis_dims);
  EXPECT_EQ(p.detector.dims(), cfg.detector_dims);
  EXPECT_EQ(p.flow.dims(), cfg.flow_dims);
  const Frame tiny("s", 1, 63, 100, FrameMode::NIR, std::vector<std::uint8_t>(63 * 100, 0));
  EXPECT_EQ(code_of([&] { preprocess(tiny, cfg); }), ErrorCode::TooSmallInput);
}

TEST(Pipeline, OneRecordPerInputAndGapReset) {
  PipelineConfig cfg;
  cfg.enable_flow = false;
  std::vector<SourceItem> items;
  for (Timestamp t : {0, 1, 2, 3, 4, 20, 21}) {
    items.push_back({"s", kDay + t, std::nullopt, make_rec("s", kDay + t, t < 10 ? 1 : 2)});
  }
  SessionPipeline pipe("s", cfg);
  ReplayDetector det;
  std::vector<CanonicalRecord> out;
  for (const auto& it : items) out.push_back(pipe.step(it, det));
  ASSERT_EQ(out.size(), items.size());
  EXPECT_EQ(out[4].logical->smoothed_person_count, 1.0);
  // the 16 s gap empties the 5 s window
  EXPECT_EQ(out[5].logical->smoothed_person_count, 2.0);
  EXPECT_FALSE(out[5].logical->person_alone);
  EXPECT_EQ(pipe.window_size(), 2u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].detection.ts, items[i].ts);
}

TEST(Pipeline, AdapterErrorNamesSecond) {
  PipelineConfig cfg;
  VectorSource src({{"s", 5, std::nullopt, std::nullopt}});
  ReplayDetector det;
  VectorSink sink;
  try {
    run_pipeline(src, det, cfg, sink);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AdapterError);
    EXPECT_NE(std::string(e.what()).find("s@5"), std::string::npos);
  }
}

TEST(Pipeline, NoiselessSimulatorMatchesTruth) {
  ScenarioSpec spec;
  spec.session_id = "p";
  spec.start_ts = kDay;
  spec.duration_s = 600;
  auto occ = [](Role r, double x) { return OccupantSpec{"", r, {ObjectClass::person, x, 200, 40, 100, 1}, {}}; };
  spec.schedule = {{0, 200, {occ(Role::patient, 100)}, 0.0},
                   {200, 400, {occ(Role::patient, 100), occ(Role::staff, 300)}, 3.0},
                   {400, 600, {occ(Role::patient, 100)}, 1.0}};
  const auto sim = generate(spec);
  SimulatorSource src(spec, sim, false);
  SyntheticDetector det(spec, sim);
  PipelineConfig cfg;
  VectorSink sink;
  const auto sum = run_pipeline(src, det, cfg, sink);
  ASSERT_EQ(sum.records, 600u);
  for (std::size_t i = 0; i < 600; ++i) {
    const int into = static_cast<int>(i % 200);
    if (into < cfg.smoothing_window_s - 1) continue;  // window straddles a schedule change
    const auto& got = *sink.rows[i].logical;
    const auto& want = *sim.truth[i].logical;
    EXPECT_EQ(got.person_alone, want.person_alone) << i;
    EXPECT_EQ(got.patient_alone, want.patient_alone) << i;
    EXPECT_EQ(got.supervised_by_staff, want.supervised_by_staff) << i;
    EXPECT_EQ(got.moving, want.moving) << i;
  }
}

TEST(Pipeline, FrameModeComputesFlow) {
  ScenarioSpec spec;
  spec.session_id = "f";
  spec.start_ts = kDay;
  spec.duration_s = 4;
  spec.schedule = {{0, 4, {{"", Role::patient, {ObjectClass::person, 100, 200, 40, 100, 1}, {}}}, 2.0}};
  const auto sim = generate(spec);
  SimulatorSource src(spec, sim, true);
  SyntheticDetector det(spec, sim);
  PipelineConfig cfg;
  VectorSink sink;
  run_pipeline(src, det, cfg, sink);
  ASSERT_EQ(sink.rows.size(), 4u);
  EXPECT_FALSE(sink.rows[0].motion && sink.rows[0].motion->scene);
  for (std::size_t i = 1; i < 4; ++i) {
    ASSERT_TRUE(sink.rows[i].motion && sink.rows[i].motion->scene) << i;
    EXPECT_NEAR(*sink.rows[i].motion->scene, spec.expected_scene_motion(2.0), 0.15) << i;
  }
}

TEST(Pipeline, ParallelMatchesSequential) {
  auto jobs_for = [] {
    std::vector<SessionJob> jobs;
    for (const char* sid : {"a", "b", "c"}) {
      std::vector<SourceItem> items;
      for (Timestamp t = 0; t < 50; ++t) items.push_back({sid, kDay + t, std::nullopt, make_rec(sid, kDay + t, 1 + t % 3)});
      jobs.push_back({std::make_unique<VectorSource>(std::move(items)), std::make_unique<ReplayDetector>()});
    }
    return jobs;
  };
  PipelineConfig cfg;
  VectorSink one, many;
  run_sessions_parallel(jobs_for(), cfg, one, 1);
  run_sessions_parallel(jobs_for(), cfg, many, 3);
  auto key = [](const CanonicalRecord& r) { return std::make_pair(r.detection.session_id, r.detection.ts); };
  auto sorted = [&](std::vector<CanonicalRecord> v) {
    std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
    return v;
  };
  EXPECT_EQ(sorted(one.rows), sorted(many.rows));
  EXPECT_EQ(one.rows.size(), 150u);
}
