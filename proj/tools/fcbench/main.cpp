#include <algorithm>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "config.hpp"
#include "fcbench/rt/env.hpp"
#include "fcbench/stats/report.hpp"
#include "fcbench/stress/injector.hpp"
#include "fcbench/trace/activation.hpp"
#include "fcbench/trace/parser.hpp"
#include "run.hpp"
#include "selftest.hpp"

namespace fcbench::tool {
namespace {

// Raw CLI values for the run/matrix subcommands. Presence is tracked through
// CLI11's count(); file config fills the gaps, built-in defaults the rest.
struct RunFlags {
  CLI::App* sub{nullptr};
  std::string config;
  std::string policy{"other"};
  int nice{0};
  int prio{50};
  std::int64_t runtime_us{400};
  std::int64_t deadline_us{4000};
  std::int64_t period_us{4000};
  std::uint64_t iterations{10000};
  int core{-1};
  std::string memlock{"auto"};
  std::size_t warmup{0};
  std::string label;
  std::string output;
  int outer_divisor{5};
  std::string stress{"off"};
  int stress_cpu{4};
  int stress_vm{2};
  double stress_vm_fraction{0.75};
  int stress_switch{2};
  int stress_fork{2};
  double cooldown_s{5.0};
  std::int64_t shuffle_seed{-1};

  void attach(CLI::App* cmd, bool matrix) {
    sub = cmd;
    cmd->add_option("--config", config, "key=value configuration file (flags win)");
    if (!matrix) {
      cmd->add_option("--policy", policy, "other|fifo|rr|deadline")
          ->check(CLI::IsMember({"other", "fifo", "rr", "deadline"}));
      cmd->add_option("--nice", nice, "nice level for --policy other (-20..19)");
      cmd->add_option("--prio", prio, "static priority for fifo/rr (1..99)");
      cmd->add_option("--runtime-us", runtime_us, "SCHED_DEADLINE runtime budget");
      cmd->add_option("--label", label, "run label (artifact directory name)");
      cmd->add_option("--stress", stress, "off|paper background stress")
          ->check(CLI::IsMember({"off", "paper", "on"}));
    } else {
      cmd->add_option("--cooldown-s", cooldown_s, "settle time between matrix cells");
      cmd->add_option("--shuffle-seed", shuffle_seed,
                      "randomize cell order with this seed (default: listed order)");
    }
    cmd->add_option("--deadline-us", deadline_us, "relative deadline D (default 4000)");
    cmd->add_option("--period-us", period_us, "period T (default 4000, 250 Hz)");
    cmd->add_option("--iterations", iterations, "control-loop iterations (default 10000)");
    cmd->add_option("--core", core, "measurement CPU (default: highest online core)");
    cmd->add_option("--memlock", memlock, "auto|on|off memory locking")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    cmd->add_option("--warmup", warmup, "extra stats excluding this many leading samples");
    cmd->add_option("--outer-divisor", outer_divisor,
                    "inner ticks per position-loop update (default 5 = 50 Hz)");
    cmd->add_option("--output", output, "output directory root (or $FCBENCH_OUT)");
    cmd->add_option("--stress-cpu", stress_cpu, "compute stressor count");
    cmd->add_option("--stress-vm", stress_vm, "memory stressor count");
    cmd->add_option("--stress-vm-fraction", stress_vm_fraction,
                    "fraction of available memory the vm stressors touch");
    cmd->add_option("--stress-switch", stress_switch, "context-switch pair count");
    cmd->add_option("--stress-fork", stress_fork, "fork/reap stressor count");
  }

  bool set(const char* name) const { return sub->count(name) > 0; }

  RunSettings resolve(bool matrix) const {
    RunSettings s;
    KeyValueConfig cfg;
    if (!config.empty()) cfg = KeyValueConfig::load(config);
    apply_config(cfg, s);

    if (set("--period-us")) s.task.period_us = period_us;
    if (set("--deadline-us")) s.task.deadline_us = deadline_us;
    if (!set("--deadline-us") && !cfg.has("deadline_us")) s.task.deadline_us = s.task.period_us;

    if (!matrix) {
      const std::string pol = set("--policy") ? policy : rt::policy_name(s.task.policy);
      const int nice_eff = set("--nice")
                               ? nice
                               : (std::holds_alternative<rt::OtherPolicy>(s.task.policy)
                                      ? std::get<rt::OtherPolicy>(s.task.policy).nice
                                      : 0);
      int prio_eff = 50;
      if (const auto* f = std::get_if<rt::FifoPolicy>(&s.task.policy)) prio_eff = f->priority;
      if (const auto* r = std::get_if<rt::RoundRobinPolicy>(&s.task.policy)) {
        prio_eff = r->priority;
      }
      if (set("--prio")) prio_eff = prio;
      std::uint64_t runtime_eff =
          std::holds_alternative<rt::DeadlinePolicy>(s.task.policy)
              ? std::get<rt::DeadlinePolicy>(s.task.policy).runtime_us
              : 400;
      if (set("--runtime-us")) runtime_eff = static_cast<std::uint64_t>(runtime_us);

      if (pol == "other") {
        s.task.policy = rt::OtherPolicy{nice_eff};
      } else if (pol == "fifo") {
        s.task.policy = rt::FifoPolicy{prio_eff};
      } else if (pol == "rr") {
        s.task.policy = rt::RoundRobinPolicy{prio_eff};
      } else {
        s.task.policy = rt::DeadlinePolicy{runtime_eff,
                                           static_cast<std::uint64_t>(s.task.deadline_us),
                                           static_cast<std::uint64_t>(s.task.period_us)};
      }
      if (set("--stress")) s.stress_on = stress != "off";
      if (set("--label")) s.label = label;
    } else {
      if (set("--cooldown-s")) s.cooldown_s = cooldown_s;
      if (set("--shuffle-seed")) s.shuffle_seed = static_cast<std::uint64_t>(shuffle_seed);
    }

    if (set("--iterations")) s.task.iterations = iterations;
    if (set("--core")) s.task.core = core;
    if (set("--memlock")) {
      s.task.memlock = memlock == "auto" ? rt::Memlock::attempt
                       : memlock == "on" ? rt::Memlock::require
                                         : rt::Memlock::off;
    }
    if (set("--warmup")) s.warmup = warmup;
    if (set("--outer-divisor")) s.outer_divisor = outer_divisor;
    if (set("--stress-cpu")) s.stress.cpu_workers = stress_cpu;
    if (set("--stress-vm")) s.stress.vm_workers = stress_vm;
    if (set("--stress-vm-fraction")) s.stress.vm_fraction = stress_vm_fraction;
    if (set("--stress-switch")) s.stress.switch_pairs = stress_switch;
    if (set("--stress-fork")) s.stress.fork_workers = stress_fork;

    const std::filesystem::path root = resolve_output_root(cfg, output);
    if (!matrix) {
      if (s.label.empty()) s.label = default_label(s.task.policy, s.stress_on);
      s.output_dir = root / s.label;
    } else {
      s.output_dir = root;  // cells get per-label subdirectories
    }
    return s;
  }
};

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() + 1) / 2 - 1];
}

int cmd_analyze(const std::string& trace_path, const std::string& task,
                const std::string& output, std::ostream& log) {
  trace::ParsedTrace parsed;
  try {
    if (trace_path == "-") {
      parsed = trace::parse_trace(std::cin);
    } else {
      parsed = trace::parse_trace_file(trace_path);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto records = trace::classify_activations(parsed.events, task);
  std::vector<double> direct, deferred;
  std::size_t incomplete = 0;
  std::vector<double> direct_spans, deferred_spans;
  for (const auto& r : records) {
    switch (r.path) {
      case trace::ActivationPath::direct:
        direct.push_back(r.wakeup_latency_us());
        if (auto s = r.exec_span_us()) direct_spans.push_back(*s);
        break;
      case trace::ActivationPath::deferred:
        deferred.push_back(r.wakeup_latency_us());
        if (auto s = r.exec_span_us()) deferred_spans.push_back(*s);
        break;
      case trace::ActivationPath::incomplete:
        ++incomplete;
        break;
    }
  }

  log << "events: " << parsed.events.size() << " parsed, " << parsed.skipped_lines
      << " malformed lines skipped\n";
  log << "activations of '" << task << "': " << direct.size() + deferred.size()
      << " complete, " << incomplete << " incomplete\n";
  if (!direct.empty()) {
    log << "direct:   n=" << direct.size() << ", median wakeup latency " << median_of(direct)
        << " us\n";
  }
  if (!deferred.empty()) {
    log << "deferred: n=" << deferred.size() << ", median wakeup latency "
        << median_of(deferred) << " us\n";
  }
  if (!direct_spans.empty() && !deferred_spans.empty()) {
    const double a = median_of(direct_spans);
    const double b = median_of(deferred_spans);
    log << "execution dilation: " << a << " us vs " << b << " us (x" << b / a << ")\n";
  }

  if (!output.empty()) {
    std::filesystem::create_directories(output);
    trace::write_activations_csv(std::filesystem::path(output) / "activations.csv", records);
    trace::write_activations_json(std::filesystem::path(output) / "activations.json", records);
    log << "records: " << output << "/activations.{csv,json}\n";
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& output,
               std::ostream& log) {
  std::vector<stats::ExperimentResult> results;
  const auto try_load = [&](const std::filesystem::path& dir) {
    const auto file = dir / "stats.json";
    if (!std::filesystem::exists(file)) return;
    try {
      auto r = stats::read_stats_json(file);
      if (r.stats.n > 0) results.push_back(std::move(r));
    } catch (const std::exception& e) {
      log << "warning: skipping " << file.string() << ": " << e.what() << "\n";
    }
  };
  for (const auto& input : inputs) {
    const std::filesystem::path dir(input);
    if (!std::filesystem::is_directory(dir)) {
      log << "warning: not a directory: " << input << "\n";
      continue;
    }
    try_load(dir);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_directory()) try_load(entry.path());
    }
  }
  if (results.empty()) {
    log << "error: no run directories with stats.json found\n";
    return kExitConfig;
  }
  const std::filesystem::path out =
      output.empty() ? std::filesystem::path("fcbench-report") : std::filesystem::path(output);
  const auto paths = stats::render_report(results, out);
  log << stats::render_table(results);
  log << "report: " << paths.table_md.string() << ", " << paths.summary_json.string() << ", "
      << paths.boxplot_csv.string() << "\n";
  return kExitOk;
}

}  // namespace
}  // namespace fcbench::tool

int main(int argc, char** argv) {
  using namespace fcbench::tool;

  CLI::App app{"fcbench: scheduling latency benchmark for a 250 Hz flight-control workload"};
  app.require_subcommand(1);

  // --- run -------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run one measurement configuration");
  RunFlags run_flags;
  run_flags.attach(run_cmd, /*matrix=*/false);

  // --- matrix ----------------------------------------------------------
  auto* matrix_cmd =
      app.add_subcommand("matrix", "run the full scheduler/stress experiment matrix");
  RunFlags matrix_flags;
  matrix_flags.attach(matrix_cmd, /*matrix=*/true);

  // --- stress ----------------------------------------------------------
  auto* stress_cmd = app.add_subcommand("stress", "run the interference profile standalone");
  int st_cpu = 4, st_vm = 2, st_switch = 2, st_fork = 2, st_core = -1;
  double st_frac = 0.75;
  long st_duration = 10;
  bool st_emit = false;
  stress_cmd->add_option("--cpu", st_cpu, "compute workers (matrix products)");
  stress_cmd->add_option("--vm", st_vm, "memory workers");
  stress_cmd->add_option("--vm-fraction", st_frac, "fraction of available memory");
  stress_cmd->add_option("--switch", st_switch, "context-switch pairs");
  stress_cmd->add_option("--fork", st_fork, "fork/reap workers");
  stress_cmd->add_option("--measurement-core", st_core,
                         "core to keep free (default: highest online)");
  stress_cmd->add_option("--duration-s", st_duration, "how long to run (default 10)");
  stress_cmd->add_flag("--emit-command", st_emit,
                       "print the equivalent external stress-ng invocation and exit");

  // --- analyze ---------------------------------------------------------
  auto* analyze_cmd =
      app.add_subcommand("analyze", "classify kernel-trace activation chains");
  std::string an_trace, an_task = "fcs", an_output;
  analyze_cmd->add_option("--trace", an_trace, "trace dump file, or - for stdin")->required();
  analyze_cmd->add_option("--task", an_task, "control task comm (default fcs)");
  analyze_cmd->add_option("--output", an_output, "directory for activations.{csv,json}");

  // --- report ----------------------------------------------------------
  auto* report_cmd =
      app.add_subcommand("report", "consolidate run directories into one report");
  std::vector<std::string> rp_inputs;
  std::string rp_output;
  report_cmd->add_option("--input", rp_inputs, "run directories or roots containing them")
      ->required();
  report_cmd->add_option("--output", rp_output, "report directory (default fcbench-report)");

  // --- env -------------------------------------------------------------
  auto* env_cmd = app.add_subcommand("env", "report the host real-time configuration");
  bool env_json = false;
  env_cmd->add_flag("--json", env_json, "emit JSON instead of text");

  // --- selftest ---------------------------------------------------------
  auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in sanity checks");
  std::string self_config;
  selftest_cmd->add_option("--config", self_config, "vehicle/gain configuration to check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return cmd_run(run_flags.resolve(false), std::cout);
    }
    if (matrix_cmd->parsed()) {
      RunSettings base = matrix_flags.resolve(true);
      return cmd_matrix(base, base.output_dir, std::cout);
    }
    if (stress_cmd->parsed()) {
      fcbench::stress::StressProfile profile;
      profile.cpu_workers = st_cpu;
      profile.vm_workers = st_vm;
      profile.vm_fraction = st_frac;
      profile.switch_pairs = st_switch;
      profile.fork_workers = st_fork;
      profile.measurement_core =
          st_core < 0 ? fcbench::rt::online_cpu_count() - 1 : st_core;
      for (int c = 0; c < fcbench::rt::online_cpu_count(); ++c) {
        if (c != profile.measurement_core) profile.allowed_cores.push_back(c);
      }
      profile.duration = std::chrono::seconds(st_duration);
      if (st_emit) {
        std::cout << fcbench::stress::external_command(profile) << "\n";
        return kExitOk;
      }
      auto handle = fcbench::stress::start_stress(profile);
      std::cout << "stress: " << handle.worker_count() << " workers for " << st_duration
                << " s (measurement core " << profile.measurement_core << " kept free)\n";
      std::this_thread::sleep_for(std::chrono::seconds(st_duration));
      const auto summary = handle.stop();
      for (std::size_t i = 0; i < summary.workers.size(); ++i) {
        std::cout << "  worker " << i << " (" << to_string(summary.workers[i].kind)
                  << "): " << summary.workers[i].loops << " loops\n";
      }
      if (summary.vm_bytes_per_worker > 0) {
        std::cout << "  vm buffer per worker: " << summary.vm_bytes_per_worker / (1 << 20)
                  << " MiB\n";
      }
      return summary.stragglers == 0 ? kExitOk : kExitConfig;
    }
    if (analyze_cmd->parsed()) {
      return cmd_analyze(an_trace, an_task, an_output, std::cout);
    }
    if (report_cmd->parsed()) {
      return cmd_report(rp_inputs, rp_output, std::cout);
    }
    if (env_cmd->parsed()) {
      const auto env = fcbench::rt::detect_environment();
      if (env_json) {
        std::cout << fcbench::stats::env_json_string(env) << "\n";
      } else {
        std::cout << fcbench::rt::describe(env);
      }
      return kExitOk;
    }
    if (selftest_cmd->parsed()) {
      RunSettings s;
      if (!self_config.empty()) {
        apply_config(KeyValueConfig::load(self_config), s);
      }
      return cmd_selftest(s, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
