#include "fcbench/rt/policy.hpp"

#include <cerrno>
#include <cstring>

#include <pthread.h>
#include <sched.h>
#include <sys/mman.h>
#include <sys/resource.h>
#include <sys/syscall.h>
#include <unistd.h>

namespace fcbench::rt {

namespace {

// sched_setattr/sched_getattr have no glibc wrappers; declare the kernel ABI
// struct locally (linux >= 3.14).
struct KernelSchedAttr {
  std::uint32_t size;
  std::uint32_t sched_policy;
  std::uint64_t sched_flags;
  std::int32_t sched_nice;
  std::uint32_t sched_priority;
  std::uint64_t sched_runtime;
  std::uint64_t sched_deadline;
  std::uint64_t sched_period;
};

constexpr std::uint32_t kSchedDeadline = 6;

int sys_sched_setattr(pid_t pid, KernelSchedAttr* attr, unsigned int flags) {
  return static_cast<int>(::syscall(SYS_sched_setattr, pid, attr, flags));
}

int sys_sched_getattr(pid_t pid, KernelSchedAttr* attr, unsigned int size,
                      unsigned int flags) {
  return static_cast<int>(::syscall(SYS_sched_getattr, pid, attr, size, flags));
}

pid_t this_tid() { return static_cast<pid_t>(::syscall(SYS_gettid)); }

std::string errno_text(const char* op, int err) {
  return std::string(op) + ": " + std::strerror(err);
}

bool likely_privileged() {
  if (::geteuid() == 0) return true;
  rlimit rl{};
  return ::getrlimit(RLIMIT_RTPRIO, &rl) == 0 && rl.rlim_cur > 0;
}

void apply_affinity(int core) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  const int rc = ::pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
  if (rc != 0) {
    throw SchedError(SchedErrc::invalid_core, errno_text("pthread_setaffinity_np", rc));
  }
}

int read_affinity_single() {
  cpu_set_t set;
  CPU_ZERO(&set);
  const int rc = ::pthread_getaffinity_np(pthread_self(), sizeof(set), &set);
  if (rc != 0) {
    throw SchedError(SchedErrc::readback_mismatch, errno_text("pthread_getaffinity_np", rc));
  }
  if (CPU_COUNT(&set) != 1) {
    throw SchedError(SchedErrc::readback_mismatch, "affinity readback is not a single core");
  }
  for (int i = 0; i < CPU_SETSIZE; ++i) {
    if (CPU_ISSET(i, &set)) return i;
  }
  throw SchedError(SchedErrc::readback_mismatch, "affinity readback empty");
}

void apply_policy(const SchedPolicy& policy) {
  if (const auto* other = std::get_if<OtherPolicy>(&policy)) {
    sched_param sp{};
    if (::sched_setscheduler(0, SCHED_OTHER, &sp) != 0) {
      const int err = errno;
      throw SchedError(err == EPERM || err == EACCES ? SchedErrc::permission_denied
                                                     : SchedErrc::policy_unsupported,
                       errno_text("sched_setscheduler(OTHER)", err));
    }
    errno = 0;
    if (::setpriority(PRIO_PROCESS, static_cast<id_t>(this_tid()), other->nice) != 0 &&
        errno != 0) {
      const int err = errno;
      throw SchedError(err == EPERM || err == EACCES ? SchedErrc::permission_denied
                                                     : SchedErrc::policy_unsupported,
                       errno_text("setpriority", err));
    }
    return;
  }

  if (const auto* dl = std::get_if<DeadlinePolicy>(&policy)) {
    KernelSchedAttr attr{};
    attr.size = sizeof(attr);
    attr.sched_policy = kSchedDeadline;
    attr.sched_runtime = dl->runtime_us * 1000;
    attr.sched_deadline = dl->deadline_us * 1000;
    attr.sched_period = dl->period_us * 1000;
    if (sys_sched_setattr(0, &attr, 0) != 0) {
      const int err = errno;
      if (err == EPERM && !likely_privileged()) {
        throw SchedError(SchedErrc::permission_denied, errno_text("sched_setattr", err));
      }
      // EPERM while privileged means the kernel refused admission (commonly a
      // pinned task whose affinity is a strict subset of its root domain;
      // isolcpus or an exclusive cpuset fixes that). ENOSYS/EINVAL mean the
      // policy is absent. Either way the policy is unsupported here.
      throw SchedError(SchedErrc::policy_unsupported,
                       errno_text("sched_setattr(SCHED_DEADLINE)", err) +
                           " (pinned SCHED_DEADLINE needs an isolated root domain, "
                           "e.g. isolcpus)");
    }
    return;
  }

  const bool fifo = std::holds_alternative<FifoPolicy>(policy);
  const int prio = fifo ? std::get<FifoPolicy>(policy).priority
                        : std::get<RoundRobinPolicy>(policy).priority;
  sched_param sp{};
  sp.sched_priority = prio;
  if (::sched_setscheduler(0, fifo ? SCHED_FIFO : SCHED_RR, &sp) != 0) {
    const int err = errno;
    // Priorities were validated up front, so EINVAL means the kernel itself
    // rejects the policy (seen on sandboxed/para-virtual kernels).
    throw SchedError(err == EPERM || err == EACCES ? SchedErrc::permission_denied
                                                   : SchedErrc::policy_unsupported,
                     errno_text(fifo ? "sched_setscheduler(FIFO)" : "sched_setscheduler(RR)",
                                err));
  }
}

SchedPolicy read_back_policy(const SchedPolicy& requested) {
  const int pol = ::sched_getscheduler(0);
  if (pol < 0) {
    throw SchedError(SchedErrc::readback_mismatch, errno_text("sched_getscheduler", errno));
  }
  if (pol == SCHED_FIFO || pol == SCHED_RR) {
    sched_param sp{};
    if (::sched_getparam(0, &sp) != 0) {
      throw SchedError(SchedErrc::readback_mismatch, errno_text("sched_getparam", errno));
    }
    if (pol == SCHED_FIFO) return FifoPolicy{sp.sched_priority};
    return RoundRobinPolicy{sp.sched_priority};
  }
  if (std::holds_alternative<DeadlinePolicy>(requested)) {
    KernelSchedAttr attr{};
    if (sys_sched_getattr(0, &attr, sizeof(attr), 0) != 0 ||
        attr.sched_policy != kSchedDeadline) {
      throw SchedError(SchedErrc::readback_mismatch, "SCHED_DEADLINE readback failed");
    }
    return DeadlinePolicy{attr.sched_runtime / 1000, attr.sched_deadline / 1000,
                          attr.sched_period / 1000};
  }
  errno = 0;
  const int nice = ::getpriority(PRIO_PROCESS, static_cast<id_t>(this_tid()));
  if (errno != 0) {
    throw SchedError(SchedErrc::readback_mismatch, errno_text("getpriority", errno));
  }
  return OtherPolicy{nice};
}

}  // namespace

bool operator==(const OtherPolicy& a, const OtherPolicy& b) { return a.nice == b.nice; }
bool operator==(const FifoPolicy& a, const FifoPolicy& b) { return a.priority == b.priority; }
bool operator==(const RoundRobinPolicy& a, const RoundRobinPolicy& b) {
  return a.priority == b.priority;
}
bool operator==(const DeadlinePolicy& a, const DeadlinePolicy& b) {
  return a.runtime_us == b.runtime_us && a.deadline_us == b.deadline_us &&
         a.period_us == b.period_us;
}

std::string policy_name(const SchedPolicy& p) {
  switch (p.index()) {
    case 0: return "other";
    case 1: return "fifo";
    case 2: return "rr";
    default: return "deadline";
  }
}

std::string scheduler_label(const SchedPolicy& p) {
  switch (p.index()) {
    case 0: return "OTHER";
    case 1: return "FIFO";
    case 2: return "RR";
    default: return "DEADLINE";
  }
}

std::string parameter_label(const SchedPolicy& p) {
  if (const auto* o = std::get_if<OtherPolicy>(&p)) {
    return "nice " + std::to_string(o->nice);
  }
  if (const auto* f = std::get_if<FifoPolicy>(&p)) {
    return "prio " + std::to_string(f->priority);
  }
  if (const auto* r = std::get_if<RoundRobinPolicy>(&p)) {
    return "prio " + std::to_string(r->priority);
  }
  const auto& d = std::get<DeadlinePolicy>(p);
  return "runtime " + std::to_string(d.runtime_us) + " us";
}

void validate(const SchedPolicy& p) {
  if (const auto* o = std::get_if<OtherPolicy>(&p)) {
    if (o->nice < -20 || o->nice > 19) {
      throw std::invalid_argument("nice must be in -20..19");
    }
    return;
  }
  if (const auto* f = std::get_if<FifoPolicy>(&p)) {
    if (f->priority < 1 || f->priority > 99) {
      throw std::invalid_argument("FIFO priority must be in 1..99");
    }
    return;
  }
  if (const auto* r = std::get_if<RoundRobinPolicy>(&p)) {
    if (r->priority < 1 || r->priority > 99) {
      throw std::invalid_argument("RR priority must be in 1..99");
    }
    return;
  }
  const auto& d = std::get<DeadlinePolicy>(p);
  if (d.runtime_us == 0 || d.runtime_us > d.deadline_us || d.deadline_us > d.period_us) {
    throw std::invalid_argument("DEADLINE requires 0 < runtime <= deadline <= period");
  }
}

void TaskSpec::validate() const {
  rt::validate(policy);
  if (period_us <= 0) throw std::invalid_argument("period_us must be > 0");
  if (deadline_us <= 0 || deadline_us > period_us) {
    throw std::invalid_argument("deadline_us must be in (0, period_us]");
  }
}

const char* to_string(SchedErrc c) {
  switch (c) {
    case SchedErrc::permission_denied: return "permission-denied";
    case SchedErrc::policy_unsupported: return "policy-unsupported";
    case SchedErrc::invalid_core: return "invalid-core";
    case SchedErrc::memlock_failed: return "memlock-failed";
    case SchedErrc::clock_failure: return "clock-failure";
    case SchedErrc::readback_mismatch: return "readback-mismatch";
  }
  return "unknown";
}

int online_cpu_count() {
  const long n = ::sysconf(_SC_NPROCESSORS_ONLN);
  return n > 0 ? static_cast<int>(n) : 1;
}

AppliedConfig configure_thread(const TaskSpec& spec) {
  spec.validate();

  const int online = online_cpu_count();
  const int core = spec.core < 0 ? online - 1 : spec.core;
  if (core >= online) {
    throw SchedError(SchedErrc::invalid_core,
                     "core " + std::to_string(core) + " >= online CPUs (" +
                         std::to_string(online) + ")");
  }
  apply_affinity(core);

  bool memlocked = false;
  if (spec.memlock != Memlock::off) {
    if (::mlockall(MCL_CURRENT | MCL_FUTURE) == 0) {
      memlocked = true;
    } else if (spec.memlock == Memlock::require) {
      throw SchedError(SchedErrc::memlock_failed, errno_text("mlockall", errno));
    }
  }

  apply_policy(spec.policy);

  AppliedConfig applied;
  applied.policy = read_back_policy(spec.policy);
  applied.core = read_affinity_single();
  applied.memlocked = memlocked;

  if (applied.policy != spec.policy) {
    throw SchedError(SchedErrc::readback_mismatch,
                     "policy readback does not match request (" + policy_name(spec.policy) +
                         " vs " + policy_name(applied.policy) + ")");
  }
  if (applied.core != core) {
    throw SchedError(SchedErrc::readback_mismatch, "affinity readback does not match request");
  }
  return applied;
}

}  // namespace fcbench::rt
