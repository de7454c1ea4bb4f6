#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcbench/trace/event.hpp"

namespace fcbench::trace {

enum class ActivationPath { direct, deferred, incomplete };

const char* to_string(ActivationPath p);

// One reconstructed wake-up chain: from the hardware interrupt to the control
// task's first user-visible activity. `intermediaries` lists housekeeping
// threads (ktimers/ksoftirqd/kworker) woken or switched in between; a chain is
// deferred exactly when that list is non-empty (an inline softirq with no
// helper thread contributes a "softirq:<vec>" entry so the rule stays
// definitional).
struct ActivationRecord {
  int cpu{-1};
  std::int64_t irq_time_ns{0};
  std::int64_t wakeup_time_ns{-1};     // wakeup targeting the task, -1 if unseen
  std::int64_t switch_in_time_ns{-1};  // switch to the task, -1 if unseen
  std::int64_t exec_begin_ns{-1};      // first task-emitted event, else the switch-in
  std::optional<std::int64_t> exec_end_ns;  // switch away from the task
  ActivationPath path{ActivationPath::incomplete};
  std::vector<std::string> intermediaries;
  int context_switches{0};

  bool complete() const { return path != ActivationPath::incomplete; }
  double wakeup_latency_us() const {
    return static_cast<double>(exec_begin_ns - irq_time_ns) / 1000.0;
  }
  // switch-in to switch-out of the task, when both were observed
  std::optional<double> exec_span_us() const {
    if (!exec_end_ns || switch_in_time_ns < 0) return std::nullopt;
    return static_cast<double>(*exec_end_ns - switch_in_time_ns) / 1000.0;
  }
};

// Cuts the event stream into per-CPU chains at each irq_handler_entry and
// classifies every chain that activates task_name as Direct (IRQ -> task,
// nothing in between) or Deferred (softirq raise / housekeeping thread on the
// way). Chains whose IRQ never leads to the task yield incomplete records.
// Events must be timestamp-ordered (parse_trace guarantees it).
std::vector<ActivationRecord> classify_activations(std::span<const TraceEvent> events,
                                                   const std::string& task_name);

struct DilationReport {
  double exec_time_a_us{0.0};
  double exec_time_b_us{0.0};
  double ratio{0.0};  // exec_time_b / exec_time_a
};

// Median execution span per side and their quotient (side b relative to
// side a). Throws std::invalid_argument when either side carries no spans.
DilationReport exec_dilation(std::span<const ActivationRecord> side_a,
                             std::span<const ActivationRecord> side_b);

// activations.csv / activations.json emission (columns/keys in the README).
void write_activations_csv(const std::filesystem::path& path,
                           std::span<const ActivationRecord> records);
void write_activations_json(const std::filesystem::path& path,
                            std::span<const ActivationRecord> records);

}  // namespace fcbench::trace
