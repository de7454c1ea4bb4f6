#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

#include "fcbench/stress/profile.hpp"

namespace fcbench::stress {

enum class WorkerKind { compute, memory, ctx_switch, fork_reap };

const char* to_string(WorkerKind k);

struct WorkerStatus {
  WorkerKind kind;
  std::uint64_t loops;  // per-worker progress counter
};

struct StressSummary {
  std::vector<WorkerStatus> workers;     // final loop counts
  int stragglers{0};                     // workers that missed the stop grace period
  bool already_stopped{false};
  std::uint64_t vm_bytes_per_worker{0};  // attained after any degradation
};

// Owns the lifecycle of a running stress profile. stop() is idempotent and
// bounded: workers that fail to exit within the grace period are detached and
// reported as stragglers rather than hanging the caller. The destructor stops
// a still-running handle.
class StressHandle {
 public:
  StressHandle(StressHandle&&) noexcept;
  StressHandle& operator=(StressHandle&&) noexcept;
  StressHandle(const StressHandle&) = delete;
  StressHandle& operator=(const StressHandle&) = delete;
  ~StressHandle();

  StressSummary stop(std::chrono::milliseconds grace = std::chrono::milliseconds{5000});

  bool running() const;
  std::size_t worker_count() const;
  // Live snapshot of per-worker loop counters.
  std::vector<std::uint64_t> loop_counts() const;
  // Live affinity of every worker thread, as CPU index lists.
  std::vector<std::vector<int>> sample_affinities() const;
  const StressProfile& attained() const;

 private:
  friend StressHandle start_stress(const StressProfile&);
  StressHandle();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Starts and pins all workers, returning once every worker confirmed its
// affinity. Memory workers degrade (halve their buffer) instead of failing
// when the requested share cannot be allocated; the attained profile is
// queryable on the handle. Affinity failures are hard errors.
StressHandle start_stress(const StressProfile& profile);

// Signals stop, reaps workers and reports per-worker loop counts.
StressSummary stop_stress(StressHandle& handle,
                          std::chrono::milliseconds grace = std::chrono::milliseconds{5000});

}  // namespace fcbench::stress
