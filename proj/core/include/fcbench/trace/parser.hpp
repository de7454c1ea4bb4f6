#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "fcbench/trace/event.hpp"

namespace fcbench::trace {

struct ParsedTrace {
  std::vector<TraceEvent> events;   // non-decreasing in timestamp
  std::size_t skipped_lines{0};     // malformed lines, counted and dropped
};

// Parses the line-oriented dump format common to ftrace/perf:
//
//   COMM-PID [CPU] (flags)? SECONDS.FRACTION: EVENT: key=value ...
//
// Comment lines (#) and blank lines are ignored without being counted as
// malformed. A subsystem prefix on the event ("sched:sched_wakeup") is
// stripped; "==>"-separated sched_switch argument pairs parse normally.
// Never throws on arbitrary line content; only stream I/O failures raise.
ParsedTrace parse_trace(std::istream& in);
ParsedTrace parse_trace_file(const std::filesystem::path& path);

}  // namespace fcbench::trace
