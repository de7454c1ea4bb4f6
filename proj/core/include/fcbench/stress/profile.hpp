#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcbench::stress {

enum class StressErrc { invalid_profile, affinity_violation, start_failed };

class StressError : public std::runtime_error {
 public:
  StressError(StressErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  StressErrc code() const { return code_; }

 private:
  StressErrc code_;
};

// Unified interference profile: compute workers (dense matrix products),
// memory workers (write/strided-read over a large buffer), context-switch
// ping-pong pairs and fork/reap workers. All workers are pinned inside
// allowed_cores, which must exclude the measurement core.
struct StressProfile {
  int cpu_workers{4};
  int vm_workers{2};
  double vm_fraction{0.75};  // of MemAvailable at start, split across vm workers
  int switch_pairs{2};
  int fork_workers{2};
  std::vector<int> allowed_cores;
  int measurement_core{-1};
  std::chrono::seconds duration{0};  // zero = run until stopped

  int worker_count() const { return cpu_workers + vm_workers + 2 * switch_pairs + fork_workers; }

  // Throws StressError: invalid_profile for bad counts/fraction/cores,
  // affinity_violation when allowed_cores touches the measurement core.
  void validate() const;

  // The Table-2 style default: 4 compute + 2 vm at 75% + switch/fork pairs,
  // allowed on every online core except the measurement core.
  static StressProfile paper_defaults(int measurement_core);
};

// Renders the profile as an equivalent stress-ng invocation for operators who
// prefer the external tool. Deterministic; no stressor flags for zero counts.
std::string external_command(const StressProfile& profile);

}  // namespace fcbench::stress
