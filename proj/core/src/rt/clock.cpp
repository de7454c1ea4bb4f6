#include "fcbench/rt/clock.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <time.h>

#include "fcbench/rt/policy.hpp"

namespace fcbench::rt {

namespace {

constexpr std::int64_t kNsPerSec = 1'000'000'000;

timespec to_timespec(std::int64_t ns) {
  timespec ts;
  ts.tv_sec = static_cast<time_t>(ns / kNsPerSec);
  ts.tv_nsec = static_cast<long>(ns % kNsPerSec);
  return ts;
}

}  // namespace

std::int64_t MonotonicClock::now_ns() {
  timespec ts;
  if (::clock_gettime(CLOCK_MONOTONIC, &ts) != 0) {
    throw SchedError(SchedErrc::clock_failure,
                     std::string("clock_gettime(CLOCK_MONOTONIC): ") + std::strerror(errno));
  }
  return static_cast<std::int64_t>(ts.tv_sec) * kNsPerSec + ts.tv_nsec;
}

void MonotonicClock::sleep_until(std::int64_t target_ns) {
  const timespec ts = to_timespec(target_ns);
  int rc;
  do {
    rc = ::clock_nanosleep(CLOCK_MONOTONIC, TIMER_ABSTIME, &ts, nullptr);
  } while (rc == EINTR);
  if (rc != 0) {
    throw SchedError(SchedErrc::clock_failure,
                     std::string("clock_nanosleep(TIMER_ABSTIME): ") + std::strerror(rc));
  }
}

void SimClock::set_oversleeps(std::vector<std::int64_t> per_sleep_ns) {
  for (std::int64_t v : per_sleep_ns) {
    if (v < 0) throw std::invalid_argument("SimClock: oversleeps must be >= 0");
  }
  oversleeps_ = std::move(per_sleep_ns);
  sleep_index_ = 0;
}

void SimClock::sleep_until(std::int64_t target_ns) {
  std::int64_t late = 0;
  if (sleep_index_ < oversleeps_.size()) late = oversleeps_[sleep_index_];
  ++sleep_index_;
  const std::int64_t wake = target_ns + late;
  if (wake > now_) now_ = wake;
}

}  // namespace fcbench::rt
