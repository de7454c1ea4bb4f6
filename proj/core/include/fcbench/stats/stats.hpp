#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fcbench::stats {

// Descriptive statistics of one latency series, all in microseconds.
// Percentiles are nearest-rank (the ceil(q*n)-th order statistic, no
// interpolation) and stddev uses the population divisor n.
struct LatencyStats {
  double mean_us{0.0};
  double median_us{0.0};
  double max_us{0.0};
  double stddev_us{0.0};
  double p90_us{0.0};
  double p99_us{0.0};
  double min_us{0.0};
  std::size_t n{0};
  std::size_t miss_count{0};
};

// Nanoseconds to whole microseconds, truncating toward zero. The truncation
// is the documented quantization step between recorded and reported values.
std::vector<std::int64_t> ns_to_us(std::span<const std::int64_t> ns);

// Nearest-rank percentile of an already sorted series, pct in 1..100.
// Rank arithmetic is integral, so no floating-point ceil artifacts.
std::int64_t percentile_sorted(std::span<const std::int64_t> sorted, int pct);

// miss_count counts samples whose latency exceeds deadline_us (the wake-side
// deadline budget); callers holding full executor samples may prefer the
// recorded per-sample miss flags. Throws std::invalid_argument on an empty
// series.
LatencyStats compute_stats(std::span<const std::int64_t> us, std::int64_t deadline_us);

// 100*(before-after)/before, rounded to one decimal.
// Throws std::invalid_argument unless before > 0.
double improvement_pct(double before, double after);

// 100*max/period, rounded to one decimal. Throws std::invalid_argument
// unless period > 0.
double jitter_fraction(double max_latency_us, double period_us);

}  // namespace fcbench::stats
