#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace fcbench::trace {

enum class EventKind {
  irq_handler_entry,
  softirq_raise,
  sched_wakeup,
  sched_switch,
  timer_expire,
  other,
};

const char* to_string(EventKind k);

// One parsed line of a kernel trace dump. `emitter` is the comm of the task
// the tracer attributed the line to; `name` keeps the raw event name even
// when kind falls back to `other`.
struct TraceEvent {
  std::int64_t timestamp_ns{0};
  int cpu{-1};
  EventKind kind{EventKind::other};
  std::string name;
  std::string emitter;
  std::map<std::string, std::string> attrs;

  // Attribute lookup, empty string when absent.
  const std::string& attr(const std::string& key) const;
};

}  // namespace fcbench::trace
