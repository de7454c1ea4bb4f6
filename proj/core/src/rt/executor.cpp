#include "fcbench/rt/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace fcbench::rt {

namespace {

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace

std::size_t SampleSeries::miss_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(),
                    [](const LatencySample& s) { return s.deadline_missed; }));
}

std::vector<std::int64_t> SampleSeries::latencies_ns() const {
  std::vector<std::int64_t> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.latency_ns());
  return out;
}

SampleSeries run_periodic(const TaskSpec& spec, const std::function<void()>& payload,
                          ClockSource& clock) {
  spec.validate();

  SampleSeries series;
  series.meta.policy = policy_name(spec.policy) + " " + parameter_label(spec.policy);
  series.meta.started_at = iso8601_now();
  series.meta.period_ns = spec.period_us * 1000;
  series.meta.deadline_ns = spec.deadline_us * 1000;

  const std::uint64_t n = spec.iterations;
  series.samples.resize(n);  // the only allocation on the measured path

  const std::int64_t period = series.meta.period_ns;
  const std::int64_t deadline = series.meta.deadline_ns;
  const std::int64_t t0 = clock.now_ns();
  series.meta.t0_ns = t0;

  std::uint64_t skipped = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::int64_t target = t0 + static_cast<std::int64_t>(k) * period;
    clock.sleep_until(target);
    std::int64_t actual = clock.now_ns();
    if (actual < target) actual = target;  // monotonic clocks cannot wake early

    bool failed = false;
    try {
      payload();
    } catch (const std::exception& e) {
      series.aborted = true;
      series.abort_reason = e.what();
      failed = true;
    } catch (...) {
      series.aborted = true;
      series.abort_reason = "payload raised a non-standard exception";
      failed = true;
    }
    if (failed) {
      series.samples.resize(k);  // shrink only, capacity untouched
      break;
    }
    const std::int64_t done = clock.now_ns();

    LatencySample& s = series.samples[k];
    s.iteration = k;
    s.scheduled_wake_ns = target;
    s.actual_wake_ns = actual;
    s.exec_ns = done - actual;
    s.deadline_missed = (actual - target) + s.exec_ns > deadline;
    if (actual > target + period) ++skipped;
  }
  series.skipped_periods = skipped;
  return series;
}

}  // namespace fcbench::rt
