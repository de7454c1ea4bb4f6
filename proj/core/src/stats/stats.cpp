#include "fcbench/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fcbench::stats {

namespace {

double round1(double v) { return std::round(v * 10.0) / 10.0; }

// ceil(pct*n/100) with integer arithmetic, clamped to [1, n]
std::size_t nearest_rank(std::size_t n, int pct) {
  const std::size_t rank = (static_cast<std::size_t>(pct) * n + 99) / 100;
  return std::max<std::size_t>(1, std::min(rank, n));
}

}  // namespace

std::vector<std::int64_t> ns_to_us(std::span<const std::int64_t> ns) {
  std::vector<std::int64_t> us;
  us.reserve(ns.size());
  for (std::int64_t v : ns) us.push_back(v / 1000);  // integral division truncates toward zero
  return us;
}

std::int64_t percentile_sorted(std::span<const std::int64_t> sorted, int pct) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty series");
  if (pct < 1 || pct > 100) throw std::invalid_argument("pct must be in 1..100");
  return sorted[nearest_rank(sorted.size(), pct) - 1];
}

LatencyStats compute_stats(std::span<const std::int64_t> us, std::int64_t deadline_us) {
  if (us.empty()) throw std::invalid_argument("compute_stats: empty series");
  const std::size_t n = us.size();

  LatencyStats st;
  st.n = n;

  double sum = 0.0;
  for (std::int64_t v : us) sum += static_cast<double>(v);
  st.mean_us = sum / static_cast<double>(n);

  double sq = 0.0;
  for (std::int64_t v : us) {
    const double d = static_cast<double>(v) - st.mean_us;
    sq += d * d;
  }
  st.stddev_us = std::sqrt(sq / static_cast<double>(n));

  // nth_element per order statistic; the full-sort route is the test oracle
  std::vector<std::int64_t> scratch(us.begin(), us.end());
  const auto order_stat = [&scratch](int pct) {
    const std::size_t idx = nearest_rank(scratch.size(), pct) - 1;
    auto it = scratch.begin() + static_cast<std::ptrdiff_t>(idx);
    std::nth_element(scratch.begin(), it, scratch.end());
    return static_cast<double>(*it);
  };
  st.median_us = order_stat(50);
  st.p90_us = order_stat(90);
  st.p99_us = order_stat(99);

  const auto [mn, mx] = std::minmax_element(us.begin(), us.end());
  st.min_us = static_cast<double>(*mn);
  st.max_us = static_cast<double>(*mx);

  st.miss_count = static_cast<std::size_t>(
      std::count_if(us.begin(), us.end(),
                    [deadline_us](std::int64_t v) { return v > deadline_us; }));
  return st;
}

double improvement_pct(double before, double after) {
  if (!(before > 0.0)) throw std::invalid_argument("improvement_pct: before must be > 0");
  return round1(100.0 * (before - after) / before);
}

double jitter_fraction(double max_latency_us, double period_us) {
  if (!(period_us > 0.0)) throw std::invalid_argument("jitter_fraction: period must be > 0");
  return round1(100.0 * max_latency_us / period_us);
}

}  // namespace fcbench::stats
