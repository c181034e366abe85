#include "ward/trends.hpp"

#include <algorithm>
#include <charconv>

#include "ward/csv.hpp"
#include "ward/errors.hpp"
#include "ward/timeutil.hpp"

namespace ward {

namespace {

struct HourCounts {
  long long day = 0;
  int hour = 0;
  int monitored = 0;
  int alone = 0;
  int alone_moving = 0;
  int supervised = 0;
  int moving = 0;
};

HourlyTrend to_trend(const std::string& session, const HourCounts& c) {
  return {session,
          format_date(c.day),
          c.hour,
          c.monitored / 60.0,
          c.alone / 60.0,
          c.alone_moving / 60.0,
          c.supervised / 60.0,
          c.moving / 60.0};
}

Timestamp parse_ts(const std::string& s, const std::string& what, std::size_t line) {
  Timestamp v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) {
    throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<HourlyTrend> aggregate_hourly(std::span<const LogicalState> states, int utc_offset_s) {
  std::vector<HourlyTrend> out;
  if (states.empty()) return out;
  const std::string& session = states.front().session_id;
  HourCounts cur;
  bool open = false;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const LogicalState& s = states[i];
    if (s.session_id != session) {
      throw Error(ErrorCode::InvalidArgument, "aggregate_hourly expects a single session");
    }
    if (i > 0 && s.ts <= states[i - 1].ts) {
      throw Error(ErrorCode::UnsortedInput, "state at ts " + std::to_string(s.ts) + " is out of order");
    }
    const long long local = s.ts + utc_offset_s;
    const long long day = local_day_index(s.ts, utc_offset_s);
    const int hour = static_cast<int>((local - day * 86400) / 3600);
    if (!open || day != cur.day || hour != cur.hour) {
      if (open) out.push_back(to_trend(session, cur));
      cur = HourCounts{day, hour};
      open = true;
    }
    ++cur.monitored;
    cur.alone += s.patient_alone;
    cur.alone_moving += s.patient_alone && s.moving;
    cur.supervised += s.supervised_by_staff;
    cur.moving += s.moving;
  }
  out.push_back(to_trend(session, cur));
  return out;
}

std::vector<CohortHour> cohort_average(std::span<const HourlyTrend> trends) {
  struct Sum {
    int n = 0;
    double monitored = 0, alone = 0, alone_moving = 0, supervised = 0, moving = 0;
  };
  // Fixed reduction order: (session, date) ascending.
  std::vector<const HourlyTrend*> ordered;
  ordered.reserve(trends.size());
  for (const auto& t : trends) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(), [](const HourlyTrend* a, const HourlyTrend* b) {
    return std::tie(a->session_id, a->date, a->hour) < std::tie(b->session_id, b->date, b->hour);
  });
  std::array<Sum, 24> sums{};
  for (const HourlyTrend* t : ordered) {
    if (t->hour < 0 || t->hour > 23) throw Error(ErrorCode::InvalidArgument, "trend hour outside 0..23");
    Sum& s = sums[t->hour];
    ++s.n;
    s.monitored += t->monitored_minutes;
    s.alone += t->alone;
    s.alone_moving += t->alone_and_moving;
    s.supervised += t->supervised_by_staff;
    s.moving += t->moving;
  }
  std::vector<CohortHour> out;
  for (int h = 0; h < 24; ++h) {
    const Sum& s = sums[h];
    CohortHour c{h, s.n, {}, {}, {}, {}, {}};
    if (s.n > 0) {
      c.monitored_minutes = s.monitored / s.n;
      c.alone = s.alone / s.n;
      c.alone_and_moving = s.alone_moving / s.n;
      c.supervised_by_staff = s.supervised / s.n;
      c.moving = s.moving / s.n;
    }
    out.push_back(c);
  }
  return out;
}

ObservationLog normalize_log(ObservationLog log) {
  for (const auto& iv : log.intervals) {
    if (iv.end <= iv.start) {
      throw Error(ErrorCode::MalformedRecord, log.session_id + ": empty interval [" + std::to_string(iv.start) +
                                                  ", " + std::to_string(iv.end) + ")");
    }
  }
  std::sort(log.intervals.begin(), log.intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < log.intervals.size(); ++i) {
    if (log.intervals[i].start < log.intervals[i - 1].end) {
      throw Error(ErrorCode::OverlappingIntervals,
                  log.session_id + ": interval starting at " + std::to_string(log.intervals[i].start) +
                      " overlaps the previous one");
    }
  }
  return log;
}

std::vector<bool> log_to_states(const ObservationLog& raw, SecondGrid grid) {
  if (grid.end < grid.start) throw Error(ErrorCode::InvalidArgument, "grid ends before it starts");
  const ObservationLog log = normalize_log(raw);
  std::vector<bool> alone(static_cast<std::size_t>(grid.length()), false);
  for (const auto& iv : log.intervals) {
    if (iv.start < grid.start || iv.end > grid.end) {
      throw Error(ErrorCode::IntervalOutOfBounds, log.session_id + ": interval [" + std::to_string(iv.start) +
                                                      ", " + std::to_string(iv.end) + ") outside the session grid");
    }
    std::fill(alone.begin() + (iv.start - grid.start), alone.begin() + (iv.end - grid.start), true);
  }
  return alone;
}

SecondGrid covering_grid(std::span<const LogicalState> states, const ObservationLog& log) {
  bool any = false;
  SecondGrid g{0, 0};
  auto extend = [&](Timestamp a, Timestamp b) {
    if (!any) {
      g = {a, b};
      any = true;
    } else {
      g.start = std::min(g.start, a);
      g.end = std::max(g.end, b);
    }
  };
  for (const auto& s : states) extend(s.ts, s.ts + 1);
  for (const auto& iv : log.intervals) extend(iv.start, iv.end);
  return g;
}

std::vector<HourlyTrend> assisted_trends(std::span<const LogicalState> states, const ObservationLog& log,
                                         int utc_offset_s) {
  if (!states.empty() && !log.session_id.empty() && log.session_id != states.front().session_id) {
    throw Error(ErrorCode::InvalidArgument, "log session " + log.session_id + " does not match states");
  }
  const SecondGrid grid = covering_grid(states, log);
  const std::vector<bool> alone = log_to_states(log, grid);
  std::vector<LogicalState> assisted(states.begin(), states.end());
  for (auto& s : assisted) {
    const bool a = alone[static_cast<std::size_t>(s.ts - grid.start)];
    s.patient_alone = a;
    s.person_alone = s.person_alone || a;
    if (a) s.supervised_by_staff = false;
  }
  return aggregate_hourly(assisted, utc_offset_s);
}

std::map<std::string, ObservationLog> read_observation_logs(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  const auto ci = t.column("session_id");
  const auto cs = t.column("start_ts");
  const auto ce = t.column("end_ts");
  if (!ci || !cs || !ce) {
    throw Error(ErrorCode::SchemaMismatch, path.string() + ": expected columns session_id,start_ts,end_ts");
  }
  std::map<std::string, ObservationLog> logs;
  for (const auto& row : t.rows) {
    if (row.cells.size() != t.header.size()) {
      throw Error(ErrorCode::MalformedRecord, path.string() + ": line " + std::to_string(row.line) + " has " +
                                                  std::to_string(row.cells.size()) + " fields");
    }
    const std::string& sid = row.cells[*ci];
    auto& log = logs[sid];
    log.session_id = sid;
    log.intervals.push_back({parse_ts(row.cells[*cs], "start_ts", row.line), parse_ts(row.cells[*ce], "end_ts", row.line)});
  }
  for (auto& [sid, log] : logs) log = normalize_log(std::move(log));
  return logs;
}

void write_observation_logs(std::ostream& out, const std::vector<ObservationLog>& logs) {
  csv::Writer w(out, "observation-log", {"session_id", "start_ts", "end_ts"});
  for (const auto& log : logs)
    for (const auto& iv : log.intervals) w.row({log.session_id, std::to_string(iv.start), std::to_string(iv.end)});
}

void write_trend_csv(std::ostream& out, std::span<const HourlyTrend> trends) {
  csv::Writer w(out, "hourly-trend",
                {"session_id", "date", "hour", "monitored_min", "alone_min", "moving_min", "alone_moving_min",
                 "supervised_min"});
  for (const auto& t : trends) {
    w.row({t.session_id, t.date, std::to_string(t.hour), csv::format_number(t.monitored_minutes),
           csv::format_number(t.alone), csv::format_number(t.moving), csv::format_number(t.alone_and_moving),
           csv::format_number(t.supervised_by_staff)});
  }
}

void write_cohort_csv(std::ostream& out, std::span<const CohortHour> cohort) {
  csv::Writer w(out, "cohort-trend",
                {"hour", "patient_days", "monitored_min", "alone_min", "moving_min", "alone_moving_min",
                 "supervised_min"});
  auto num = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string(); };
  for (const auto& c : cohort) {
    w.row({std::to_string(c.hour), std::to_string(c.patient_days), num(c.monitored_minutes), num(c.alone),
           num(c.moving), num(c.alone_and_moving), num(c.supervised_by_staff)});
  }
}

}  // namespace ward
