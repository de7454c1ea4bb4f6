#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fcbench/rt/clock.hpp"
#include "fcbench/rt/policy.hpp"

namespace fcbench::rt {

// One iteration of the periodic loop: when the wake was scheduled, when it
// actually happened, how long the payload ran, and whether the absolute
// deadline was blown (actual_wake + exec > scheduled + D).
struct LatencySample {
  std::uint64_t iteration{0};
  std::int64_t scheduled_wake_ns{0};
  std::int64_t actual_wake_ns{0};
  std::int64_t exec_ns{0};
  bool deadline_missed{false};

  std::int64_t latency_ns() const { return actual_wake_ns - scheduled_wake_ns; }
};

struct SeriesMeta {
  std::string policy;      // e.g. "fifo prio 50"
  bool stress{false};
  std::string kernel;      // kernel identity
  std::string started_at;  // wall-clock start, ISO-8601
  std::int64_t t0_ns{0};
  std::int64_t period_ns{0};
  std::int64_t deadline_ns{0};
};

struct SampleSeries {
  std::vector<LatencySample> samples;
  SeriesMeta meta;
  std::uint64_t skipped_periods{0};  // wakes landing past their successor's target
  bool aborted{false};               // payload threw; samples truncated at that point
  std::string abort_reason;

  std::size_t miss_count() const;
  std::vector<std::int64_t> latencies_ns() const;
};

// Runs the payload once per period against the absolute schedule t0 + k*T.
// Overruns never shift the schedule: the k-th wake target is always
// t0 + k*T, so a late iteration cannot cause drift. The sample buffer is
// allocated up front; the measured loop performs no further allocation and no
// blocking call other than the deadline sleep. A payload exception aborts the
// run and returns the partial series flagged instead of throwing.
SampleSeries run_periodic(const TaskSpec& spec, const std::function<void()>& payload,
                          ClockSource& clock);

}  // namespace fcbench::rt
