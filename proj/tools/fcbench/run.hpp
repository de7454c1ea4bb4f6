#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "config.hpp"
#include "fcbench/stats/report.hpp"

namespace fcbench::tool {

// Exit-code contract: 0 = run completed (deadline misses are data, not
// failures), 1 = configuration/privilege error, 2 = environment unsupported.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitUnsupported = 2;

struct RunOutcome {
  int exit_code{kExitOk};
  std::string error;
  std::optional<stats::ExperimentResult> result;
  std::filesystem::path run_dir;
};

// One configuration end to end: environment detection, optional stress
// injection, thread configuration, the periodic measurement, artifact
// emission (series.csv, stats.json, env.json).
RunOutcome run_one(RunSettings settings, std::ostream& log);

int cmd_run(RunSettings settings, std::ostream& log);

// The full experiment matrix (OTHER nice {0,-19}; FIFO/RR prio {50,99};
// DEADLINE runtime {400,800}) x stress {off,on}, sequentially with cool-down
// gaps. Per-cell failures are recorded and the matrix continues.
int cmd_matrix(RunSettings base, const std::filesystem::path& output_root, std::ostream& log);

}  // namespace fcbench::tool
