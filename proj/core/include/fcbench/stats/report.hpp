#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcbench/rt/env.hpp"
#include "fcbench/rt/executor.hpp"
#include "fcbench/stats/stats.hpp"

namespace fcbench::stats {

// One completed run of the experiment matrix: where it ran, under which
// scheduler configuration, and what the latency series looked like.
struct ExperimentResult {
  std::string label;
  std::string scheduler;   // OTHER | FIFO | RR | DEADLINE
  std::string parameters;  // "nice 0", "prio 99", "runtime 400 us"
  std::string kernel;      // "standard" | "PREEMPT_RT" (see kernel_label)
  bool stress{false};
  std::int64_t period_us{4000};
  std::int64_t deadline_us{4000};
  std::uint64_t iterations{0};
  std::size_t warmup{0};
  LatencyStats stats;
  std::optional<LatencyStats> stats_post_warmup;  // present when warmup > 0
  std::uint64_t skipped_periods{0};
  bool aborted{false};
  std::string abort_reason;
  rt::EnvReport env;
  std::vector<std::pair<std::string, std::string>> config_echo;  // resolved run config
  std::filesystem::path series_path;  // raw-series reference

  void validate() const;  // scheduler label must be a known configuration
};

std::string kernel_label(const rt::EnvReport& env);  // "PREEMPT_RT" or "standard"

// --- stable file surfaces (columns/keys documented in the README) ----------

// series.csv: iteration,scheduled_wake_ns,latency_us,exec_us,missed
void write_series_csv(const std::filesystem::path& path, const rt::SampleSeries& series);
// Reads a series.csv back; wake/exec times are reconstructed at the
// microsecond quantization the file carries.
rt::SampleSeries read_series_csv(const std::filesystem::path& path);

// Statistics over the recorded series, skipping a warm-up prefix. miss_count
// comes from the recorded per-sample flags (the executor's deadline rule).
LatencyStats stats_from_series(const rt::SampleSeries& series, std::size_t warmup_skip = 0);

void write_stats_json(const std::filesystem::path& path, const ExperimentResult& result);
ExperimentResult read_stats_json(const std::filesystem::path& path);

void write_env_json(const std::filesystem::path& path, const rt::EnvReport& env);
std::string env_json_string(const rt::EnvReport& env);

// Markdown table with exactly the unified-comparison column set, grouped by
// scheduler / parameters / kernel / stress.
std::string render_table(const std::vector<ExperimentResult>& results);

struct ReportPaths {
  std::filesystem::path table_md;
  std::filesystem::path summary_json;
  std::filesystem::path boxplot_csv;
};

// Writes report.md, summary.json (rows + environment + derived metrics:
// per-row jitter fraction and standard->PREEMPT_RT worst-case improvements)
// and box-plot/time-series data files under out_dir. Throws std::runtime_error
// with path context on write failure.
ReportPaths render_report(const std::vector<ExperimentResult>& results,
                          const std::filesystem::path& out_dir);

}  // namespace fcbench::stats
