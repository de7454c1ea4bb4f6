#pragma once

#include <string>
#include <vector>

namespace fcbench::rt {

// Snapshot of the host settings that matter for latency experiments. Purely
// observational; fields that cannot be read come back as "unknown" / empty.
struct EnvReport {
  std::string kernel_release;             // uname -r
  bool realtime_kernel{false};            // PREEMPT_RT detected
  int online_cpus{0};
  std::vector<std::string> governors;     // per-CPU cpufreq governor
  std::vector<int> isolated_cpus;         // isolcpus= set
  std::string rt_throttle;                // "disabled", "<N> us" or "unknown"
};

EnvReport detect_environment();

// Human-readable multi-line rendering (the JSON form lives in stats/report).
std::string describe(const EnvReport& env);

}  // namespace fcbench::rt
