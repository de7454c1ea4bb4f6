#include "fcbench/stress/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcbench/rt/policy.hpp"

namespace fcbench::stress {

void StressProfile::validate() const {
  if (cpu_workers < 0 || vm_workers < 0 || switch_pairs < 0 || fork_workers < 0) {
    throw StressError(StressErrc::invalid_profile, "stressor counts must be >= 0");
  }
  if (!(vm_fraction > 0.0) || vm_fraction > 0.9) {
    throw StressError(StressErrc::invalid_profile, "vm_fraction must be in (0, 0.9]");
  }
  if (allowed_cores.empty()) {
    throw StressError(StressErrc::invalid_profile, "allowed_cores must be non-empty");
  }
  const int online = rt::online_cpu_count();
  for (int core : allowed_cores) {
    if (core < 0 || core >= online) {
      throw StressError(StressErrc::invalid_profile,
                        "allowed core " + std::to_string(core) + " is not online");
    }
    if (core == measurement_core) {
      throw StressError(StressErrc::affinity_violation,
                        "allowed_cores includes the measurement core " +
                            std::to_string(measurement_core));
    }
  }
}

StressProfile StressProfile::paper_defaults(int measurement_core) {
  StressProfile p;
  p.measurement_core = measurement_core;
  const int online = rt::online_cpu_count();
  for (int core = 0; core < online; ++core) {
    if (core != measurement_core) p.allowed_cores.push_back(core);
  }
  return p;
}

std::string external_command(const StressProfile& profile) {
  std::ostringstream cmd;
  cmd << "stress-ng";
  if (profile.cpu_workers > 0) {
    cmd << " --cpu " << profile.cpu_workers << " --cpu-method matrixprod";
  }
  if (profile.vm_workers > 0) {
    cmd << " --vm " << profile.vm_workers << " --vm-bytes "
        << std::lround(profile.vm_fraction * 100.0) << "%";
  }
  if (profile.switch_pairs > 0) cmd << " --switch " << profile.switch_pairs;
  if (profile.fork_workers > 0) cmd << " --fork " << profile.fork_workers;
  if (!profile.allowed_cores.empty()) {
    std::vector<int> cores = profile.allowed_cores;
    std::sort(cores.begin(), cores.end());
    cmd << " --taskset ";
    for (std::size_t i = 0; i < cores.size(); ++i) {
      if (i) cmd << ",";
      cmd << cores[i];
    }
  }
  if (profile.duration.count() > 0) cmd << " --timeout " << profile.duration.count() << "s";
  return cmd.str();
}

}  // namespace fcbench::stress
