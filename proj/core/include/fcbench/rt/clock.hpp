#pragma once

#include <cstdint>
#include <vector>

namespace fcbench::rt {

// Time source seam for the periodic executor: the real monotonic clock for
// measurements, a simulated clock for deterministic tests.
class ClockSource {
 public:
  virtual ~ClockSource() = default;
  virtual std::int64_t now_ns() = 0;
  // Blocks until the absolute time target_ns on this clock. Returning before
  // the target is not allowed.
  virtual void sleep_until(std::int64_t target_ns) = 0;
};

// CLOCK_MONOTONIC via clock_gettime / clock_nanosleep(TIMER_ABSTIME).
// Throws SchedError(clock_failure) if the clock is unavailable.
class MonotonicClock final : public ClockSource {
 public:
  std::int64_t now_ns() override;
  void sleep_until(std::int64_t target_ns) override;
};

// Virtual time. sleep_until() lands exactly on the target plus an injected
// per-sleep oversleep (indexed by sleep count, zero once the script runs
// out); payloads model execution cost by calling advance(). Never allocates
// after set_oversleeps(), so it is safe inside allocation-purity tests.
class SimClock final : public ClockSource {
 public:
  explicit SimClock(std::int64_t start_ns = 0) : now_(start_ns) {}

  void set_oversleeps(std::vector<std::int64_t> per_sleep_ns);
  void advance(std::int64_t ns) { now_ += ns; }

  std::int64_t now_ns() override { return now_; }
  void sleep_until(std::int64_t target_ns) override;

  std::size_t sleeps() const { return sleep_index_; }

 private:
  std::int64_t now_;
  std::vector<std::int64_t> oversleeps_;
  std::size_t sleep_index_{0};
};

}  // namespace fcbench::rt
