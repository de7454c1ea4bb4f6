#include "run.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "fcbench/control/loop.hpp"
#include "fcbench/rt/clock.hpp"
#include "fcbench/rt/env.hpp"
#include "fcbench/rt/executor.hpp"
#include "fcbench/stress/injector.hpp"

namespace fcbench::tool {

namespace {

int exit_code_for(const rt::SchedError& e) {
  switch (e.code()) {
    case rt::SchedErrc::policy_unsupported:
    case rt::SchedErrc::clock_failure:
      return kExitUnsupported;
    default:
      return kExitConfig;
  }
}

std::string hint_for(const rt::SchedError& e) {
  if (e.code() == rt::SchedErrc::permission_denied) {
    return "hint: run as root, grant CAP_SYS_NICE, or raise the rtprio rlimit";
  }
  if (e.code() == rt::SchedErrc::memlock_failed) {
    return "hint: raise the memlock rlimit or pass --memlock off";
  }
  return "";
}

}  // namespace

RunOutcome run_one(RunSettings s, std::ostream& log) {
  RunOutcome out;
  try {
    s.task.validate();
    s.vehicle.validate();
    s.gains.validate();
    if (s.outer_divisor < 1) throw std::invalid_argument("outer divisor must be >= 1");
  } catch (const std::exception& e) {
    out.exit_code = kExitConfig;
    out.error = e.what();
    log << "error: " << out.error << "\n";
    return out;
  }

  const int online = rt::online_cpu_count();
  if (s.task.core < 0) s.task.core = online - 1;
  if (s.label.empty()) s.label = default_label(s.task.policy, s.stress_on);
  if (s.output_dir.empty()) s.output_dir = std::filesystem::path("fcbench-out") / s.label;

  const rt::EnvReport env = rt::detect_environment();
  log << "run '" << s.label << "': " << rt::policy_name(s.task.policy) << " "
      << rt::parameter_label(s.task.policy) << ", core " << s.task.core << ", "
      << s.task.iterations << " iterations, period " << s.task.period_us << " us, stress "
      << (s.stress_on ? "on" : "off") << "\n";

  std::optional<stress::StressHandle> stress_handle;
  if (s.stress_on) {
    s.stress.measurement_core = s.task.core;
    if (s.stress.allowed_cores.empty()) {
      for (int c = 0; c < online; ++c) {
        if (c != s.task.core) s.stress.allowed_cores.push_back(c);
      }
    }
    try {
      stress_handle = stress::start_stress(s.stress);
      log << "stress: " << stress_handle->worker_count() << " workers pinned off core "
          << s.task.core << "\n";
    } catch (const stress::StressError& e) {
      out.exit_code = kExitConfig;
      out.error = e.what();
      log << "error: " << out.error << "\n";
      return out;
    }
  }

  rt::SampleSeries series;
  rt::AppliedConfig applied;
  std::exception_ptr failure;
  {
    control::FcsLoop::Config loop_cfg;
    loop_cfg.params = s.vehicle;
    loop_cfg.gains = s.gains;
    loop_cfg.dt = std::min<double>(static_cast<double>(s.task.period_us), 10000.0) / 1e6;
    loop_cfg.outer_divisor = s.outer_divisor;

    std::thread measurement([&] {
      try {
        applied = rt::configure_thread(s.task);
        control::FcsLoop loop(loop_cfg);
        rt::MonotonicClock clock;
        series = rt::run_periodic(s.task, [&loop] { loop.tick(); }, clock);
      } catch (...) {
        failure = std::current_exception();
      }
    });
    measurement.join();
  }

  if (stress_handle) {
    const stress::StressSummary summary = stress_handle->stop();
    std::uint64_t total_loops = 0;
    for (const auto& w : summary.workers) total_loops += w.loops;
    log << "stress: stopped, " << summary.workers.size() << " workers, " << total_loops
        << " total loops";
    if (summary.stragglers > 0) log << ", " << summary.stragglers << " stragglers";
    log << "\n";
  }

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const rt::SchedError& e) {
      out.exit_code = exit_code_for(e);
      out.error = std::string(rt::to_string(e.code())) + ": " + e.what();
      log << "error: " << out.error << "\n";
      if (const std::string hint = hint_for(e); !hint.empty()) log << hint << "\n";
    } catch (const std::exception& e) {
      out.exit_code = kExitConfig;
      out.error = e.what();
      log << "error: " << out.error << "\n";
    }
    return out;
  }

  if (s.task.memlock == rt::Memlock::attempt && !applied.memlocked) {
    log << "memlock: not permitted on this host, continuing unlocked\n";
  }

  std::filesystem::create_directories(s.output_dir);
  out.run_dir = s.output_dir;

  series.meta.policy = rt::policy_name(s.task.policy) + " " + rt::parameter_label(s.task.policy);
  series.meta.stress = s.stress_on;
  series.meta.kernel = env.kernel_release;

  stats::ExperimentResult r;
  r.label = s.label;
  r.scheduler = rt::scheduler_label(s.task.policy);
  r.parameters = rt::parameter_label(s.task.policy);
  r.kernel = stats::kernel_label(env);
  r.stress = s.stress_on;
  r.period_us = s.task.period_us;
  r.deadline_us = s.task.deadline_us;
  r.iterations = s.task.iterations;
  r.warmup = s.warmup;
  r.env = env;
  r.config_echo = s.echo();
  r.config_echo.emplace_back("applied.core", std::to_string(applied.core));
  r.config_echo.emplace_back("applied.memlocked", applied.memlocked ? "true" : "false");
  r.config_echo.emplace_back("started_at", series.meta.started_at);
  r.skipped_periods = series.skipped_periods;
  r.aborted = series.aborted;
  r.abort_reason = series.abort_reason;
  r.series_path = s.output_dir / "series.csv";

  if (!series.samples.empty()) {
    r.stats = stats::stats_from_series(series);
    if (s.warmup > 0 && series.samples.size() > s.warmup) {
      r.stats_post_warmup = stats::stats_from_series(series, s.warmup);
    }
  }

  stats::write_series_csv(r.series_path, series);
  stats::write_stats_json(s.output_dir / "stats.json", r);
  stats::write_env_json(s.output_dir / "env.json", env);

  if (!series.samples.empty()) {
    log << "samples " << r.stats.n << ": mean " << r.stats.mean_us << " us, median "
        << r.stats.median_us << " us, max " << r.stats.max_us << " us, p99 " << r.stats.p99_us
        << " us, misses " << r.stats.miss_count << ", skipped " << r.skipped_periods << "\n";
  } else {
    log << "empty run (0 iterations)\n";
  }
  log << "artifacts: " << s.output_dir.string() << "\n";

  if (series.aborted) {
    out.exit_code = kExitConfig;
    out.error = "payload aborted: " + series.abort_reason;
    log << "error: " << out.error << "\n";
    return out;
  }
  out.result = std::move(r);
  return out;
}

int cmd_run(RunSettings settings, std::ostream& log) {
  return run_one(std::move(settings), log).exit_code;
}

int cmd_matrix(RunSettings base, const std::filesystem::path& output_root, std::ostream& log) {
  struct Cell {
    rt::SchedPolicy policy;
    bool stress;
  };
  const std::uint64_t period = static_cast<std::uint64_t>(base.task.period_us);
  const std::vector<rt::SchedPolicy> policies{
      rt::OtherPolicy{0},
      rt::OtherPolicy{-19},
      rt::FifoPolicy{50},
      rt::FifoPolicy{99},
      rt::RoundRobinPolicy{50},
      rt::RoundRobinPolicy{99},
      rt::DeadlinePolicy{400, period, period},
      rt::DeadlinePolicy{800, period, period},
  };
  std::vector<Cell> cells;
  for (const auto& p : policies) {
    for (bool stress : {false, true}) cells.push_back({p, stress});
  }
  if (base.shuffle_seed) {
    std::mt19937_64 rng(*base.shuffle_seed);
    std::shuffle(cells.begin(), cells.end(), rng);
  }

  std::vector<stats::ExperimentResult> results;
  std::vector<std::pair<std::string, std::string>> failed;  // label -> error

  for (std::size_t i = 0; i < cells.size(); ++i) {
    RunSettings s = base;
    s.task.policy = cells[i].policy;
    s.stress_on = cells[i].stress;
    s.label = default_label(cells[i].policy, cells[i].stress);
    s.output_dir = output_root / s.label;
    log << "[" << i + 1 << "/" << cells.size() << "] ";
    RunOutcome outcome = run_one(std::move(s), log);
    if (outcome.result) {
      results.push_back(std::move(*outcome.result));
    } else {
      failed.emplace_back(default_label(cells[i].policy, cells[i].stress), outcome.error);
    }
    if (i + 1 < cells.size() && base.cooldown_s > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(base.cooldown_s));
    }
  }

  std::vector<stats::ExperimentResult> reportable;
  for (const auto& r : results) {
    if (r.stats.n > 0) reportable.push_back(r);
  }
  if (!reportable.empty()) {
    const auto paths = stats::render_report(reportable, output_root);
    log << "\n" << stats::render_table(reportable) << "\n";
    log << "report: " << paths.table_md.string() << ", " << paths.summary_json.string() << ", "
        << paths.boxplot_csv.string() << "\n";
  }
  log << "matrix: " << results.size() << " of " << cells.size() << " cells completed";
  if (!failed.empty()) {
    log << ", " << failed.size() << " flagged:\n";
    for (const auto& [label, why] : failed) log << "  " << label << ": " << why << "\n";
  } else {
    log << "\n";
  }
  return results.empty() ? kExitUnsupported : kExitOk;
}

}  // namespace fcbench::tool
