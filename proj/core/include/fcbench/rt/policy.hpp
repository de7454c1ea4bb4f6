#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace fcbench::rt {

struct OtherPolicy {
  int nice{0};  // -20..19
};
struct FifoPolicy {
  int priority{50};  // 1..99
};
struct RoundRobinPolicy {
  int priority{50};  // 1..99
};
struct DeadlinePolicy {
  std::uint64_t runtime_us{400};
  std::uint64_t deadline_us{4000};
  std::uint64_t period_us{4000};
};

using SchedPolicy = std::variant<OtherPolicy, FifoPolicy, RoundRobinPolicy, DeadlinePolicy>;

// "other", "fifo", "rr", "deadline"
std::string policy_name(const SchedPolicy& p);
// Table-style labels: scheduler ("OTHER".."DEADLINE") and its parameter string
// ("nice -19", "prio 99", "runtime 400 us").
std::string scheduler_label(const SchedPolicy& p);
std::string parameter_label(const SchedPolicy& p);

// Throws std::invalid_argument on out-of-range priorities/nice values or a
// deadline policy violating runtime <= deadline <= period.
void validate(const SchedPolicy& p);

bool operator==(const OtherPolicy& a, const OtherPolicy& b);
bool operator==(const FifoPolicy& a, const FifoPolicy& b);
bool operator==(const RoundRobinPolicy& a, const RoundRobinPolicy& b);
bool operator==(const DeadlinePolicy& a, const DeadlinePolicy& b);

enum class Memlock {
  off,      // do not lock
  attempt,  // lock if the host allows it, report the outcome
  require   // failure to lock is an error
};

// The periodic task under measurement: estimated cost C, period T, deadline D
// and the policy/priority P it runs under, plus placement and run length.
struct TaskSpec {
  SchedPolicy policy{OtherPolicy{}};
  std::int64_t period_us{4000};    // T, 250 Hz default
  std::int64_t deadline_us{4000};  // D <= T
  std::int64_t exec_estimate_us{0};  // C estimate, informational only
  int core{-1};                    // CPU index; -1 picks the highest online core
  std::uint64_t iterations{10000};
  Memlock memlock{Memlock::attempt};

  void validate() const;  // throws std::invalid_argument
};

enum class SchedErrc {
  permission_denied,
  policy_unsupported,
  invalid_core,
  memlock_failed,
  clock_failure,
  readback_mismatch,
};

const char* to_string(SchedErrc c);

class SchedError : public std::runtime_error {
 public:
  SchedError(SchedErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  SchedErrc code() const { return code_; }

 private:
  SchedErrc code_;
};

// Settings read back from the OS after configure_thread applied them.
struct AppliedConfig {
  SchedPolicy policy{};
  int core{-1};
  bool memlocked{false};
};

// Applies policy/priority, affinity and memory locking to the calling thread,
// reads every setting back and returns it. A readback that does not match the
// request raises SchedError instead of returning; an unsupported policy is
// reported, never silently downgraded.
AppliedConfig configure_thread(const TaskSpec& spec);

int online_cpu_count();

}  // namespace fcbench::rt
