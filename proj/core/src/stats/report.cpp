#include "fcbench/stats/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fcbench::stats {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownSchedulers{"OTHER", "FIFO", "RR", "DEADLINE"};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

json stats_to_json(const LatencyStats& s) {
  return json{{"n", s.n},           {"mean_us", s.mean_us},     {"median_us", s.median_us},
              {"max_us", s.max_us}, {"stddev_us", s.stddev_us}, {"p90_us", s.p90_us},
              {"p99_us", s.p99_us}, {"min_us", s.min_us},       {"miss_count", s.miss_count}};
}

LatencyStats stats_from_json(const json& j) {
  LatencyStats s;
  s.n = j.at("n").get<std::size_t>();
  s.mean_us = j.at("mean_us").get<double>();
  s.median_us = j.at("median_us").get<double>();
  s.max_us = j.at("max_us").get<double>();
  s.stddev_us = j.at("stddev_us").get<double>();
  s.p90_us = j.at("p90_us").get<double>();
  s.p99_us = j.at("p99_us").get<double>();
  s.min_us = j.at("min_us").get<double>();
  s.miss_count = j.at("miss_count").get<std::size_t>();
  return s;
}

json env_to_json(const rt::EnvReport& env) {
  return json{{"kernel_release", env.kernel_release},
              {"realtime_kernel", env.realtime_kernel},
              {"online_cpus", env.online_cpus},
              {"governors", env.governors},
              {"isolated_cpus", env.isolated_cpus},
              {"rt_throttle", env.rt_throttle}};
}

rt::EnvReport env_from_json(const json& j) {
  rt::EnvReport env;
  env.kernel_release = j.value("kernel_release", "");
  env.realtime_kernel = j.value("realtime_kernel", false);
  env.online_cpus = j.value("online_cpus", 0);
  env.governors = j.value("governors", std::vector<std::string>{});
  env.isolated_cpus = j.value("isolated_cpus", std::vector<int>{});
  env.rt_throttle = j.value("rt_throttle", "unknown");
  return env;
}

// Table-3 listing order: OTHER nice {0,-19}, FIFO/RR prio {50,99},
// DEADLINE runtime {400,800}; standard kernel before PREEMPT_RT, idle before
// stress.
int scheduler_rank(const std::string& s) {
  if (s == "OTHER") return 0;
  if (s == "FIFO") return 1;
  if (s == "RR") return 2;
  if (s == "DEADLINE") return 3;
  return 4;
}

long param_rank(const ExperimentResult& r) {
  long v = 0;
  std::size_t i = 0;
  while (i < r.parameters.size() && (r.parameters[i] < '-' || r.parameters[i] > '9')) ++i;
  if (i < r.parameters.size()) v = std::strtol(r.parameters.c_str() + i, nullptr, 10);
  return r.scheduler == "OTHER" ? -v : v;  // nice 0 lists before nice -19
}

std::vector<ExperimentResult> table_order(std::vector<ExperimentResult> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ExperimentResult& a, const ExperimentResult& b) {
                     const auto key = [](const ExperimentResult& r) {
                       return std::tuple(scheduler_rank(r.scheduler), param_rank(r),
                                         r.kernel == "PREEMPT_RT" ? 1 : 0, r.stress ? 1 : 0);
                     };
                     return key(a) < key(b);
                   });
  return rows;
}

std::string sanitize(const std::string& label) {
  std::string out;
  for (char c : label) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '-');
  }
  return out;
}

// Minimal SVG renderings of the plot data files; anything fancier belongs in
// the consumer's plotting stack.
void write_timeseries_svg(const std::filesystem::path& path, const std::string& title,
                          const std::vector<std::int64_t>& latencies_us) {
  if (latencies_us.empty()) return;
  const double w = 900, h = 280, ml = 70, mb = 30, mt = 24, mr = 10;
  const double max_y =
      std::max<double>(1.0, static_cast<double>(
                                *std::max_element(latencies_us.begin(), latencies_us.end())));
  const double plot_w = w - ml - mr, plot_h = h - mt - mb;
  auto out = open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "' viewBox='0 0 " << w << " " << h << "'>\n";
  out << "<text x='" << ml << "' y='16' font-family='monospace' font-size='13'>" << title
      << " (latency us per iteration, max " << max_y << ")</text>\n";
  out << "<rect x='" << ml << "' y='" << mt << "' width='" << plot_w << "' height='" << plot_h
      << "' fill='none' stroke='#999'/>\n";
  out << "<polyline fill='none' stroke='#c0392b' stroke-width='0.7' points='";
  const std::size_t n = latencies_us.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ml + plot_w * static_cast<double>(i) / static_cast<double>(n > 1 ? n - 1 : 1);
    const double y = mt + plot_h * (1.0 - static_cast<double>(latencies_us[i]) / max_y);
    out << fmt2(x) << ',' << fmt2(y) << ' ';
  }
  out << "'/>\n";
  out << "<text x='4' y='" << mt + 10 << "' font-family='monospace' font-size='11'>"
      << max_y << "</text>\n";
  out << "<text x='4' y='" << mt + plot_h << "' font-family='monospace' font-size='11'>0</text>\n";
  out << "</svg>\n";
}

struct BoxData {
  std::string label;
  double min, p25, median, p75, max;
};

void write_boxplot_svg(const std::filesystem::path& path, const std::vector<BoxData>& boxes) {
  if (boxes.empty()) return;
  const double slot = 110.0, h = 320, mb = 70, mt = 24;
  const double w = 60.0 + slot * static_cast<double>(boxes.size());
  double max_y = 1.0;
  for (const auto& b : boxes) max_y = std::max(max_y, b.max);
  const double plot_h = h - mt - mb;
  const auto y_of = [&](double v) { return mt + plot_h * (1.0 - v / max_y); };

  auto out = open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "' viewBox='0 0 " << w << " " << h << "'>\n";
  out << "<text x='8' y='16' font-family='monospace' font-size='13'>latency box plot (us, max "
      << max_y << ")</text>\n";
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = 60.0 + slot * (static_cast<double>(i) + 0.5);
    const double bw = 40.0;
    out << "<line x1='" << cx << "' y1='" << fmt2(y_of(b.min)) << "' x2='" << cx << "' y2='"
        << fmt2(y_of(b.max)) << "' stroke='#555'/>\n";
    out << "<rect x='" << cx - bw / 2 << "' y='" << fmt2(y_of(b.p75)) << "' width='" << bw
        << "' height='" << fmt2(std::max(1.0, y_of(b.p25) - y_of(b.p75)))
        << "' fill='#aed6f1' stroke='#2471a3'/>\n";
    out << "<line x1='" << cx - bw / 2 << "' y1='" << fmt2(y_of(b.median)) << "' x2='"
        << cx + bw / 2 << "' y2='" << fmt2(y_of(b.median))
        << "' stroke='#c0392b' stroke-width='2'/>\n";
    out << "<text x='" << cx << "' y='" << h - mb + 16
        << "' font-family='monospace' font-size='10' text-anchor='middle'>" << b.label
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void ExperimentResult::validate() const {
  if (!kKnownSchedulers.count(scheduler)) {
    throw std::invalid_argument("unknown scheduler label: " + scheduler);
  }
}

std::string kernel_label(const rt::EnvReport& env) {
  return env.realtime_kernel ? "PREEMPT_RT" : "standard";
}

void write_series_csv(const std::filesystem::path& path, const rt::SampleSeries& series) {
  auto out = open_out(path);
  out << "iteration,scheduled_wake_ns,latency_us,exec_us,missed\n";
  for (const auto& s : series.samples) {
    out << s.iteration << ',' << s.scheduled_wake_ns << ',' << s.latency_ns() / 1000 << ','
        << s.exec_ns / 1000 << ',' << (s.deadline_missed ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

rt::SampleSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  rt::SampleSeries series;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rt::LatencySample s;
    std::int64_t latency_us = 0, exec_us = 0;
    int missed = 0;
    if (std::sscanf(line.c_str(), "%" SCNu64 ",%" SCNd64 ",%" SCNd64 ",%" SCNd64 ",%d",
                    &s.iteration, &s.scheduled_wake_ns, &latency_us, &exec_us,
                    &missed) != 5) {
      throw std::runtime_error("malformed series row in " + path.string() + ": " + line);
    }
    s.actual_wake_ns = s.scheduled_wake_ns + latency_us * 1000;
    s.exec_ns = exec_us * 1000;
    s.deadline_missed = missed != 0;
    series.samples.push_back(s);
  }
  return series;
}

LatencyStats stats_from_series(const rt::SampleSeries& series, std::size_t warmup_skip) {
  if (series.samples.size() <= warmup_skip) {
    throw std::invalid_argument("stats_from_series: warm-up prefix swallows the series");
  }
  std::vector<std::int64_t> lat_us;
  lat_us.reserve(series.samples.size() - warmup_skip);
  std::size_t misses = 0;
  for (std::size_t i = warmup_skip; i < series.samples.size(); ++i) {
    lat_us.push_back(series.samples[i].latency_ns() / 1000);
    if (series.samples[i].deadline_missed) ++misses;
  }
  LatencyStats st = compute_stats(lat_us, series.meta.deadline_ns / 1000);
  st.miss_count = misses;  // the executor's recorded rule wins
  return st;
}

void write_stats_json(const std::filesystem::path& path, const ExperimentResult& r) {
  json j{{"label", r.label},
         {"scheduler", r.scheduler},
         {"parameters", r.parameters},
         {"kernel", r.kernel},
         {"stress", r.stress},
         {"period_us", r.period_us},
         {"deadline_us", r.deadline_us},
         {"iterations", r.iterations},
         {"warmup", r.warmup},
         {"stats", stats_to_json(r.stats)},
         {"skipped_periods", r.skipped_periods},
         {"aborted", r.aborted},
         {"series", r.series_path.filename().string()},
         {"env", env_to_json(r.env)},
         {"derived", json{{"jitter_pct_of_period",
                           jitter_fraction(r.stats.max_us,
                                           static_cast<double>(r.period_us))}}}};
  if (r.stats_post_warmup) j["stats_post_warmup"] = stats_to_json(*r.stats_post_warmup);
  if (r.aborted) j["abort_reason"] = r.abort_reason;
  json echo = json::object();
  for (const auto& [k, v] : r.config_echo) echo[k] = v;
  j["config"] = echo;

  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ExperimentResult read_stats_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json j;
  in >> j;

  ExperimentResult r;
  r.label = j.value("label", "");
  r.scheduler = j.at("scheduler").get<std::string>();
  r.parameters = j.at("parameters").get<std::string>();
  r.kernel = j.at("kernel").get<std::string>();
  r.stress = j.at("stress").get<bool>();
  r.period_us = j.value("period_us", std::int64_t{4000});
  r.deadline_us = j.value("deadline_us", r.period_us);
  r.iterations = j.value("iterations", std::uint64_t{0});
  r.warmup = j.value("warmup", std::size_t{0});
  r.stats = stats_from_json(j.at("stats"));
  if (j.contains("stats_post_warmup")) {
    r.stats_post_warmup = stats_from_json(j.at("stats_post_warmup"));
  }
  r.skipped_periods = j.value("skipped_periods", std::uint64_t{0});
  r.aborted = j.value("aborted", false);
  r.abort_reason = j.value("abort_reason", "");
  if (j.contains("env")) r.env = env_from_json(j.at("env"));
  if (j.contains("config")) {
    for (const auto& [k, v] : j.at("config").items()) {
      r.config_echo.emplace_back(k, v.get<std::string>());
    }
  }
  if (j.contains("series")) {
    r.series_path = path.parent_path() / j.at("series").get<std::string>();
  }
  return r;
}

void write_env_json(const std::filesystem::path& path, const rt::EnvReport& env) {
  auto out = open_out(path);
  out << env_to_json(env).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string env_json_string(const rt::EnvReport& env) { return env_to_json(env).dump(2); }

std::string render_table(const std::vector<ExperimentResult>& results) {
  const auto rows = table_order(results);
  std::ostringstream os;
  os << "| Scheduler | Parameters | Kernel | Stress | Mean (us) | Median (us) | Max (us) "
        "| StdDev (us) | P90 (us) | P99 (us) |\n";
  os << "|---|---|---|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    os << "| " << r.scheduler << " | " << r.parameters << " | " << r.kernel << " | "
       << (r.stress ? "Yes" : "No") << " | " << fmt2(s.mean_us) << " | " << fmt2(s.median_us)
       << " | " << fmt2(s.max_us) << " | " << fmt2(s.stddev_us) << " | " << fmt2(s.p90_us)
       << " | " << fmt2(s.p99_us) << " |\n";
  }
  return os.str();
}

ReportPaths render_report(const std::vector<ExperimentResult>& results,
                          const std::filesystem::path& out_dir) {
  if (results.empty()) throw std::invalid_argument("render_report: no results");
  for (const auto& r : results) r.validate();
  std::filesystem::create_directories(out_dir);

  ReportPaths paths{out_dir / "report.md", out_dir / "summary.json", out_dir / "boxplot.csv"};

  {
    auto out = open_out(paths.table_md);
    out << "# Scheduling latency comparison\n\n" << render_table(results);
  }

  const auto rows = table_order(results);

  // box-plot quartiles come from the raw series when it is on disk
  std::vector<BoxData> boxes;
  {
    auto out = open_out(paths.boxplot_csv);
    out << "scheduler,parameters,kernel,stress,n,min_us,p25_us,median_us,p75_us,p90_us,"
           "p99_us,max_us\n";
    for (const auto& r : rows) {
      std::string p25, p75;
      if (!r.series_path.empty() && std::filesystem::exists(r.series_path)) {
        const auto series = read_series_csv(r.series_path);
        std::vector<std::int64_t> lat;
        lat.reserve(series.samples.size());
        for (const auto& s : series.samples) lat.push_back(s.latency_ns() / 1000);
        if (!lat.empty()) {
          std::sort(lat.begin(), lat.end());
          p25 = std::to_string(percentile_sorted(lat, 25));
          p75 = std::to_string(percentile_sorted(lat, 75));
          boxes.push_back({sanitize(r.label.empty() ? r.scheduler : r.label),
                           static_cast<double>(lat.front()),
                           static_cast<double>(percentile_sorted(lat, 25)),
                           static_cast<double>(percentile_sorted(lat, 50)),
                           static_cast<double>(percentile_sorted(lat, 75)),
                           static_cast<double>(lat.back())});
        }
      }
      out << r.scheduler << ',' << r.parameters << ',' << r.kernel << ','
          << (r.stress ? 1 : 0) << ',' << r.stats.n << ',' << fmt2(r.stats.min_us) << ','
          << p25 << ',' << fmt2(r.stats.median_us) << ',' << p75 << ','
          << fmt2(r.stats.p90_us) << ',' << fmt2(r.stats.p99_us) << ','
          << fmt2(r.stats.max_us) << '\n';
    }
  }
  write_boxplot_svg(out_dir / "boxplot.svg", boxes);

  // per-run time-series data files for plotting
  for (const auto& r : rows) {
    if (r.series_path.empty() || !std::filesystem::exists(r.series_path)) continue;
    const auto series = read_series_csv(r.series_path);
    const std::string base = r.label.empty()
                                 ? r.scheduler + "-" + r.parameters +
                                       (r.stress ? "-stress" : "-idle")
                                 : r.label;
    const std::string stem = "timeseries-" + sanitize(base);
    std::vector<std::int64_t> lat;
    lat.reserve(series.samples.size());
    auto out = open_out(out_dir / (stem + ".csv"));
    out << "iteration,latency_us\n";
    for (const auto& s : series.samples) {
      out << s.iteration << ',' << s.latency_ns() / 1000 << '\n';
      lat.push_back(s.latency_ns() / 1000);
    }
    write_timeseries_svg(out_dir / (stem + ".svg"), r.label, lat);
  }

  json summary;
  summary["rows"] = json::array();
  for (const auto& r : rows) {
    json row{{"label", r.label},
             {"scheduler", r.scheduler},
             {"parameters", r.parameters},
             {"kernel", r.kernel},
             {"stress", r.stress},
             {"period_us", r.period_us},
             {"series", r.series_path.string()},
             {"stats", stats_to_json(r.stats)},
             {"jitter_pct_of_period",
              jitter_fraction(r.stats.max_us, static_cast<double>(r.period_us))}};
    summary["rows"].push_back(std::move(row));
  }

  // worst-case improvement standard -> PREEMPT_RT for matching configurations
  json improvements = json::array();
  for (const auto& a : rows) {
    if (a.kernel != "standard") continue;
    for (const auto& b : rows) {
      if (b.kernel != "PREEMPT_RT" || b.scheduler != a.scheduler ||
          b.parameters != a.parameters || b.stress != a.stress) {
        continue;
      }
      improvements.push_back(json{{"scheduler", a.scheduler},
                                  {"parameters", a.parameters},
                                  {"stress", a.stress},
                                  {"standard_max_us", a.stats.max_us},
                                  {"preempt_rt_max_us", b.stats.max_us},
                                  {"improvement_pct",
                                   improvement_pct(a.stats.max_us, b.stats.max_us)}});
    }
  }
  summary["derived"] = json{{"improvements", std::move(improvements)}};

  std::map<std::string, json> envs;
  for (const auto& r : rows) envs.emplace(r.kernel, env_to_json(r.env));
  summary["envs"] = json::object();
  for (auto& [k, v] : envs) summary["envs"][k] = std::move(v);

  {
    auto out = open_out(paths.summary_json);
    out << summary.dump(2) << '\n';
  }
  return paths;
}

}  // namespace fcbench::stats
