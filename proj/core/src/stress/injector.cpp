#include "fcbench/stress/injector.hpp"

#include <atomic>
#include <cstring>
#include <deque>
#include <fstream>
#include <memory>
#include <new>
#include <semaphore>
#include <sstream>
#include <thread>

#include <pthread.h>
#include <sched.h>
#include <sys/wait.h>
#include <time.h>
#include <unistd.h>

namespace fcbench::stress {

namespace {

constexpr std::int64_t kNsPerSec = 1'000'000'000;
constexpr std::uint64_t kVmChunkBytes = 64ull << 20;   // progress/stop granularity
constexpr std::uint64_t kVmMinBytes = 64ull << 20;     // degradation floor
constexpr std::uint64_t kVmReserveBytes = 1ull << 30;  // headroom kept for the host
constexpr auto kForkInterval = std::chrono::milliseconds{2};  // ~500 spawns/s cap

std::int64_t mono_now_ns() {
  timespec ts;
  ::clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<std::int64_t>(ts.tv_sec) * kNsPerSec + ts.tv_nsec;
}

std::uint64_t mem_available_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::uint64_t kb = 0;
  while (in >> key >> kb) {
    std::string unit;
    std::getline(in, unit);
    if (key == "MemAvailable:") return kb * 1024;
  }
  const long pages = ::sysconf(_SC_AVPHYS_PAGES);
  const long page = ::sysconf(_SC_PAGESIZE);
  if (pages > 0 && page > 0) {
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
  }
  return 256ull << 20;
}

void escape(const void* p) { asm volatile("" : : "g"(p) : "memory"); }

struct SwitchChannel {
  std::binary_semaphore ping{1};
  std::binary_semaphore pong{0};
};

struct SharedState {
  std::atomic<bool> stop{false};
  std::int64_t deadline_ns{0};  // 0 = run until stopped
  std::atomic<int> ready{0};

  struct Slot {
    WorkerKind kind{WorkerKind::compute};
    std::atomic<std::uint64_t> loops{0};
    std::atomic<bool> done{false};
    std::atomic<int> affinity_err{0};
  };
  std::deque<Slot> slots;
  std::deque<SwitchChannel> channels;
  std::atomic<std::uint64_t> vm_bytes{0};

  bool expired() const { return deadline_ns != 0 && mono_now_ns() > deadline_ns; }
  bool should_run() const { return !stop.load(std::memory_order_relaxed) && !expired(); }
};

using StatePtr = std::shared_ptr<SharedState>;

cpu_set_t to_cpu_set(const std::vector<int>& cores) {
  cpu_set_t set;
  CPU_ZERO(&set);
  for (int c : cores) CPU_SET(c, &set);
  return set;
}

// Pins the calling worker thread, then reports readiness. Returns false (and
// marks the slot done) when pinning failed; start_stress treats that as fatal.
bool enter_worker(const StatePtr& st, SharedState::Slot* slot, const cpu_set_t& allowed) {
  const int rc = ::pthread_setaffinity_np(pthread_self(), sizeof(allowed), &allowed);
  if (rc != 0) {
    slot->affinity_err.store(rc);
    slot->done.store(true);
    st->ready.fetch_add(1);
    return false;
  }
  st->ready.fetch_add(1);
  return true;
}

void compute_worker(StatePtr st, SharedState::Slot* slot, cpu_set_t allowed) {
  if (!enter_worker(st, slot, allowed)) return;
  constexpr int n = 64;  // fits L1/L2: pressure lands on the ALU pipeline
  std::vector<double> a(n * n), b(n * n), c(n * n);
  for (int i = 0; i < n * n; ++i) {
    a[i] = 1.0 + (i % 7) * 0.25;
    b[i] = 2.0 - (i % 5) * 0.5;
  }
  while (st->should_run()) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += a[i * n + k] * b[k * n + j];
        c[i * n + j] = acc;
      }
    }
    escape(c.data());
    slot->loops.fetch_add(1, std::memory_order_relaxed);
  }
  slot->done.store(true);
}

void memory_worker(StatePtr st, SharedState::Slot* slot, cpu_set_t allowed,
                   std::uint64_t bytes) {
  if (!enter_worker(st, slot, allowed)) return;
  // Degrade by halving instead of failing outright when the share cannot be
  // allocated; the attained size is published for the summary.
  char* buf = nullptr;
  while (bytes >= kVmMinBytes) {
    buf = new (std::nothrow) char[bytes];
    if (buf) break;
    bytes /= 2;
  }
  if (!buf) {
    slot->done.store(true);
    return;
  }
  st->vm_bytes.store(bytes);

  while (st->should_run()) {
    for (std::uint64_t off = 0; off < bytes && st->should_run(); off += kVmChunkBytes) {
      const std::uint64_t len = std::min(kVmChunkBytes, bytes - off);
      std::memset(buf + off, static_cast<int>(slot->loops.load() & 0xff), len);
      slot->loops.fetch_add(1, std::memory_order_relaxed);
    }
    // strided reads at cache-line distance defeat the prefetch-friendly
    // locality of the write pass and force L3/DRAM traffic
    std::uint64_t sum = 0;
    for (std::uint64_t off = 0; off < bytes && st->should_run(); off += kVmChunkBytes) {
      const std::uint64_t end = std::min(off + kVmChunkBytes, bytes);
      for (std::uint64_t i = off; i < end; i += 64) sum += static_cast<std::uint8_t>(buf[i]);
      slot->loops.fetch_add(1, std::memory_order_relaxed);
    }
    escape(&sum);
  }
  delete[] buf;
  slot->done.store(true);
}

void switch_worker(StatePtr st, SharedState::Slot* slot, cpu_set_t allowed,
                   SwitchChannel* ch, bool first) {
  if (!enter_worker(st, slot, allowed)) return;
  std::binary_semaphore& take = first ? ch->ping : ch->pong;
  std::binary_semaphore& give = first ? ch->pong : ch->ping;
  while (st->should_run()) {
    if (!take.try_acquire_for(std::chrono::milliseconds{1})) continue;
    slot->loops.fetch_add(1, std::memory_order_relaxed);
    give.release();
  }
  slot->done.store(true);
}

void fork_worker(StatePtr st, SharedState::Slot* slot, cpu_set_t allowed) {
  if (!enter_worker(st, slot, allowed)) return;
  while (st->should_run()) {
    const pid_t pid = ::fork();
    if (pid == 0) ::_exit(0);
    if (pid > 0) {
      int status = 0;
      ::waitpid(pid, &status, 0);
      slot->loops.fetch_add(1, std::memory_order_relaxed);
    }
    std::this_thread::sleep_for(kForkInterval);
  }
  slot->done.store(true);
}

}  // namespace

const char* to_string(WorkerKind k) {
  switch (k) {
    case WorkerKind::compute: return "cpu";
    case WorkerKind::memory: return "vm";
    case WorkerKind::ctx_switch: return "switch";
    case WorkerKind::fork_reap: return "fork";
  }
  return "?";
}

struct StressHandle::Impl {
  StatePtr state;
  std::vector<std::thread> threads;
  StressProfile profile;
  bool stopped{false};
  StressSummary summary;
};

StressHandle::StressHandle() : impl_(std::make_unique<Impl>()) {}
StressHandle::StressHandle(StressHandle&&) noexcept = default;
StressHandle& StressHandle::operator=(StressHandle&&) noexcept = default;

StressHandle::~StressHandle() {
  if (impl_ && !impl_->stopped) stop();
}

bool StressHandle::running() const { return impl_ && !impl_->stopped; }

std::size_t StressHandle::worker_count() const {
  return impl_ ? impl_->state->slots.size() : 0;
}

const StressProfile& StressHandle::attained() const {
  static const StressProfile empty{};
  return impl_ ? impl_->profile : empty;
}

std::vector<std::uint64_t> StressHandle::loop_counts() const {
  std::vector<std::uint64_t> out;
  if (!impl_) return out;
  for (const auto& slot : impl_->state->slots) out.push_back(slot.loops.load());
  return out;
}

std::vector<std::vector<int>> StressHandle::sample_affinities() const {
  std::vector<std::vector<int>> out;
  if (!impl_) return out;
  for (auto& t : impl_->threads) {
    std::vector<int> cores;
    if (t.joinable()) {
      cpu_set_t set;
      CPU_ZERO(&set);
      if (::pthread_getaffinity_np(t.native_handle(), sizeof(set), &set) == 0) {
        for (int c = 0; c < CPU_SETSIZE; ++c) {
          if (CPU_ISSET(c, &set)) cores.push_back(c);
        }
      }
    }
    out.push_back(std::move(cores));
  }
  return out;
}

StressSummary StressHandle::stop(std::chrono::milliseconds grace) {
  if (!impl_) {
    StressSummary gone;
    gone.already_stopped = true;
    return gone;
  }
  Impl& impl = *impl_;
  if (impl.stopped) {
    StressSummary again = impl.summary;
    again.already_stopped = true;
    return again;
  }
  impl.state->stop.store(true);

  const auto deadline = std::chrono::steady_clock::now() + grace;
  for (;;) {
    bool all_done = true;
    for (const auto& slot : impl.state->slots) {
      if (!slot.done.load()) {
        all_done = false;
        break;
      }
    }
    if (all_done || std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds{1});
  }

  StressSummary summary;
  summary.vm_bytes_per_worker = impl.state->vm_bytes.load();
  for (std::size_t i = 0; i < impl.threads.size(); ++i) {
    auto& slot = impl.state->slots[i];
    summary.workers.push_back({slot.kind, slot.loops.load()});
    if (slot.done.load()) {
      impl.threads[i].join();
    } else {
      // never hang the caller; the detached worker still polls the stop flag
      // and holds a reference to the shared state
      impl.threads[i].detach();
      ++summary.stragglers;
    }
  }
  impl.stopped = true;
  impl.summary = summary;
  return summary;
}

StressSummary stop_stress(StressHandle& handle, std::chrono::milliseconds grace) {
  return handle.stop(grace);
}

StressHandle start_stress(const StressProfile& profile) {
  profile.validate();

  StressHandle handle;
  auto& impl = *handle.impl_;
  impl.profile = profile;
  impl.state = std::make_shared<SharedState>();
  if (profile.duration.count() > 0) {
    impl.state->deadline_ns =
        mono_now_ns() + static_cast<std::int64_t>(profile.duration.count()) * kNsPerSec;
  }

  const cpu_set_t allowed = to_cpu_set(profile.allowed_cores);
  const int total = profile.worker_count();
  for (int i = 0; i < total; ++i) impl.state->slots.emplace_back();
  for (int i = 0; i < profile.switch_pairs; ++i) impl.state->channels.emplace_back();

  std::uint64_t vm_bytes = 0;
  if (profile.vm_workers > 0) {
    const std::uint64_t avail = mem_available_bytes();
    const std::uint64_t want =
        static_cast<std::uint64_t>(profile.vm_fraction * static_cast<double>(avail));
    const std::uint64_t cap = avail > kVmReserveBytes ? avail - kVmReserveBytes : avail / 2;
    vm_bytes = std::min(want, cap) / static_cast<std::uint64_t>(profile.vm_workers);
  }

  const StatePtr st = impl.state;
  std::size_t slot = 0;
  for (int i = 0; i < profile.cpu_workers; ++i, ++slot) {
    st->slots[slot].kind = WorkerKind::compute;
    impl.threads.emplace_back(compute_worker, st, &st->slots[slot], allowed);
  }
  for (int i = 0; i < profile.vm_workers; ++i, ++slot) {
    st->slots[slot].kind = WorkerKind::memory;
    impl.threads.emplace_back(memory_worker, st, &st->slots[slot], allowed, vm_bytes);
  }
  for (int i = 0; i < profile.switch_pairs; ++i) {
    for (int side = 0; side < 2; ++side, ++slot) {
      st->slots[slot].kind = WorkerKind::ctx_switch;
      impl.threads.emplace_back(switch_worker, st, &st->slots[slot], allowed,
                                &st->channels[static_cast<std::size_t>(i)], side == 0);
    }
  }
  for (int i = 0; i < profile.fork_workers; ++i, ++slot) {
    st->slots[slot].kind = WorkerKind::fork_reap;
    impl.threads.emplace_back(fork_worker, st, &st->slots[slot], allowed);
  }

  while (st->ready.load() < total) std::this_thread::sleep_for(std::chrono::milliseconds{1});

  for (const auto& s : st->slots) {
    if (s.affinity_err.load() != 0) {
      handle.stop();
      throw StressError(StressErrc::start_failed,
                        std::string("worker pinning failed: ") +
                            std::strerror(s.affinity_err.load()));
    }
  }
  return handle;
}

}  // namespace fcbench::stress
