#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <unistd.h>

#include "fcbench/stats/report.hpp"
#include "fcbench/stats/stats.hpp"
#include "oracles.hpp"

using namespace fcbench::stats;

namespace {

std::filesystem::path temp_dir(const char* tag) {
  auto dir = std::filesystem::temp_directory_path() /
             (std::string("fcbench-test-") + tag + "-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ns_to_us truncates toward zero") {
  const std::vector<std::int64_t> ns{1999, 0, 3999, 4000, 4001, 999};
  const auto us = ns_to_us(ns);
  CHECK(us == std::vector<std::int64_t>{1, 0, 3, 4, 4, 0});
}

TEST_CASE("compute_stats on the uniform rank series") {
  std::vector<std::int64_t> series(100);
  std::iota(series.begin(), series.end(), 1);  // 1..100
  const LatencyStats s = compute_stats(series, 4000);
  CHECK(s.median_us == 50.0);
  CHECK(s.p90_us == 90.0);
  CHECK(s.p99_us == 99.0);
  CHECK(s.max_us == 100.0);
  CHECK(s.min_us == 1.0);
  CHECK(s.n == 100);
  CHECK(s.miss_count == 0);
}

TEST_CASE("compute_stats on a constant series") {
  const std::vector<std::int64_t> series{7, 7, 7};
  const LatencyStats s = compute_stats(series, 4000);
  CHECK(s.mean_us == 7.0);
  CHECK(s.stddev_us == 0.0);
  CHECK(s.median_us == 7.0);
}

TEST_CASE("compute_stats rejects the empty series") {
  CHECK_THROWS_AS(compute_stats(std::vector<std::int64_t>{}, 4000), std::invalid_argument);
}

TEST_CASE("compute_stats equals the naive full-sort reference on random input") {
  std::mt19937_64 rng(7321);
  std::uniform_int_distribution<std::int64_t> value(0, 10000);
  std::uniform_int_distribution<std::size_t> length(1, 4000);

  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> series(length(rng));
    for (auto& v : series) v = value(rng);
    const LatencyStats got = compute_stats(series, 4000);
    const oracle::RefStats want = oracle::ref_stats(series, 4000);
    CHECK(got.mean_us == want.mean);
    CHECK(got.stddev_us == want.stddev);
    CHECK(got.median_us == want.median);
    CHECK(got.p90_us == want.p90);
    CHECK(got.p99_us == want.p99);
    CHECK(got.min_us == want.min);
    CHECK(got.max_us == want.max);
    CHECK(got.miss_count == want.miss);
  }
}

TEST_CASE("compute_stats is invariant under permutation") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> value(0, 500);
  std::vector<std::int64_t> series(1000);
  for (auto& v : series) v = value(rng);
  const LatencyStats a = compute_stats(series, 100);
  std::shuffle(series.begin(), series.end(), rng);
  const LatencyStats b = compute_stats(series, 100);
  // order statistics and counts are exactly order-free; the accumulated
  // moments only up to floating-point reassociation
  CHECK(a.median_us == b.median_us);
  CHECK(a.p90_us == b.p90_us);
  CHECK(a.p99_us == b.p99_us);
  CHECK(a.min_us == b.min_us);
  CHECK(a.max_us == b.max_us);
  CHECK(a.miss_count == b.miss_count);
  CHECK(a.mean_us == doctest::Approx(b.mean_us).epsilon(1e-12));
  CHECK(a.stddev_us == doctest::Approx(b.stddev_us).epsilon(1e-9));
}

TEST_CASE("order-statistic sandwich holds") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> value(0, 100000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> series(1 + static_cast<std::size_t>(rng() % 3000));
    for (auto& v : series) v = value(rng);
    const LatencyStats s = compute_stats(series, 4000);
    CHECK(s.min_us <= s.median_us);
    CHECK(s.median_us <= s.p90_us);
    CHECK(s.p90_us <= s.p99_us);
    CHECK(s.p99_us <= s.max_us);
  }
}

TEST_CASE("improvement percentages match the published comparisons") {
  CHECK(improvement_pct(9424, 3635) == 61.4);
  CHECK(improvement_pct(1848, 224) == 87.9);
  CHECK(improvement_pct(8626, 5993) == 30.5);
  CHECK(improvement_pct(123.0, 123.0) == 0.0);
  CHECK_THROWS_AS(improvement_pct(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(improvement_pct(-5.0, 1.0), std::invalid_argument);
}

TEST_CASE("jitter fraction of the period") {
  CHECK(jitter_fraction(224, 4000) == 5.6);
  CHECK(jitter_fraction(20, 4000) == 0.5);
  CHECK(jitter_fraction(0, 4000) == 0.0);
  CHECK_THROWS_AS(jitter_fraction(1, 0), std::invalid_argument);
}

TEST_CASE("series csv round trip") {
  fcbench::rt::SampleSeries series;
  series.meta.period_ns = 4'000'000;
  series.meta.deadline_ns = 4'000'000;
  for (std::uint64_t k = 0; k < 50; ++k) {
    fcbench::rt::LatencySample s;
    s.iteration = k;
    s.scheduled_wake_ns = 1'000'000 + static_cast<std::int64_t>(k) * 4'000'000;
    s.actual_wake_ns = s.scheduled_wake_ns + static_cast<std::int64_t>(k % 7) * 1000;
    s.exec_ns = 52'000;
    s.deadline_missed = (k == 13);
    series.samples.push_back(s);
  }
  const auto dir = temp_dir("series");
  const auto path = dir / "series.csv";
  write_series_csv(path, series);

  const auto back = read_series_csv(path);
  REQUIRE(back.samples.size() == series.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) {
    CHECK(back.samples[i].iteration == series.samples[i].iteration);
    CHECK(back.samples[i].scheduled_wake_ns == series.samples[i].scheduled_wake_ns);
    CHECK(back.samples[i].latency_ns() == series.samples[i].latency_ns());
    CHECK(back.samples[i].deadline_missed == series.samples[i].deadline_missed);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("stats_from_series honors warm-up and the recorded miss flags") {
  fcbench::rt::SampleSeries series;
  series.meta.deadline_ns = 4'000'000;
  for (std::uint64_t k = 0; k < 10; ++k) {
    fcbench::rt::LatencySample s;
    s.iteration = k;
    s.scheduled_wake_ns = static_cast<std::int64_t>(k) * 4'000'000;
    // a silly warm-up spike at k=0
    s.actual_wake_ns = s.scheduled_wake_ns + (k == 0 ? 9'000'000 : 1000);
    s.exec_ns = 3'999'000;  // pushes the k=0 sample over the deadline
    s.deadline_missed = k == 0;
    series.samples.push_back(s);
  }
  const LatencyStats all = stats_from_series(series);
  CHECK(all.n == 10);
  CHECK(all.miss_count == 1);
  CHECK(all.max_us == 9000.0);
  const LatencyStats trimmed = stats_from_series(series, 1);
  CHECK(trimmed.n == 9);
  CHECK(trimmed.miss_count == 0);
  CHECK(trimmed.max_us == 1.0);
  CHECK_THROWS_AS(stats_from_series(series, 10), std::invalid_argument);
}

TEST_CASE("stats json round trip is bit-exact") {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<std::int64_t> value(0, 12345);
  std::vector<std::int64_t> series(997);
  for (auto& v : series) v = value(rng);

  ExperimentResult r;
  r.label = "fifo-p50";
  r.scheduler = "FIFO";
  r.parameters = "prio 50";
  r.kernel = "standard";
  r.stress = true;
  r.iterations = series.size();
  r.stats = compute_stats(series, 4000);
  r.env.kernel_release = "6.8.0-test";
  r.env.rt_throttle = "disabled";
  r.config_echo = {{"policy", "fifo"}, {"prio", "50"}};

  const auto dir = temp_dir("statsjson");
  const auto path = dir / "stats.json";
  write_stats_json(path, r);
  const ExperimentResult back = read_stats_json(path);

  CHECK(back.stats.mean_us == r.stats.mean_us);
  CHECK(back.stats.median_us == r.stats.median_us);
  CHECK(back.stats.max_us == r.stats.max_us);
  CHECK(back.stats.stddev_us == r.stats.stddev_us);
  CHECK(back.stats.p90_us == r.stats.p90_us);
  CHECK(back.stats.p99_us == r.stats.p99_us);
  CHECK(back.stats.min_us == r.stats.min_us);
  CHECK(back.stats.n == r.stats.n);
  CHECK(back.stats.miss_count == r.stats.miss_count);
  CHECK(back.scheduler == "FIFO");
  CHECK(back.stress);
  CHECK(back.config_echo == r.config_echo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("render_table carries exactly the unified comparison columns") {
  ExperimentResult r;
  r.scheduler = "FIFO";
  r.parameters = "prio 99";
  r.kernel = "PREEMPT_RT";
  r.stress = true;
  r.stats.mean_us = 31.33;
  r.stats.median_us = 25.0;
  r.stats.max_us = 224.0;
  r.stats.stddev_us = 21.61;
  r.stats.p90_us = 50.0;
  r.stats.p99_us = 130.0;
  r.stats.n = 10000;

  const std::string table = render_table({r});
  CHECK(table.find("| Scheduler | Parameters | Kernel | Stress | Mean (us) | Median (us) | "
                   "Max (us) | StdDev (us) | P90 (us) | P99 (us) |") != std::string::npos);
  CHECK(table.find("31.33") != std::string::npos);
  CHECK(table.find("224.00") != std::string::npos);
  CHECK(table.find("| FIFO | prio 99 | PREEMPT_RT | Yes |") != std::string::npos);
}

TEST_CASE("render_report groups rows and derives improvements") {
  std::vector<ExperimentResult> rows;
  const auto mk = [](const std::string& sched, const std::string& param,
                     const std::string& kernel, bool stress, double max_us) {
    ExperimentResult r;
    r.scheduler = sched;
    r.parameters = param;
    r.kernel = kernel;
    r.stress = stress;
    r.label = sched + "-" + param + (stress ? "-s" : "");
    r.stats.mean_us = max_us / 4;
    r.stats.median_us = max_us / 8;
    r.stats.max_us = max_us;
    r.stats.p90_us = max_us / 2;
    r.stats.p99_us = max_us * 0.9;
    r.stats.n = 100;
    return r;
  };
  rows.push_back(mk("FIFO", "prio 99", "PREEMPT_RT", true, 224.0));
  rows.push_back(mk("FIFO", "prio 99", "standard", true, 1848.0));
  rows.push_back(mk("OTHER", "nice 0", "standard", false, 2724.0));

  const auto dir = temp_dir("report");
  const auto paths = render_report(rows, dir);
  CHECK(std::filesystem::exists(paths.table_md));
  CHECK(std::filesystem::exists(paths.summary_json));
  CHECK(std::filesystem::exists(paths.boxplot_csv));

  std::ifstream in(paths.summary_json);
  const std::string summary((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  CHECK(summary.find("\"improvement_pct\": 87.9") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("render_report refuses an empty result set and unknown labels") {
  CHECK_THROWS_AS(render_report({}, std::filesystem::temp_directory_path()),
                  std::invalid_argument);
  ExperimentResult bogus;
  bogus.scheduler = "BATCH";
  CHECK_THROWS_AS(render_report({bogus}, std::filesystem::temp_directory_path()),
                  std::invalid_argument);
}
