#pragma once

// Test-only reference implementations. These stay independent of the library
// code paths they check: the allocator is verified against a generic
// Gaussian-elimination solve, the statistics against a naive full-sort pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

using Mat4 = std::array<std::array<double, 4>, 4>;

inline std::array<double, 4> solve4(Mat4 a, std::array<double, 4> b) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) throw std::runtime_error("solve4: singular system");
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, 4> x{};
  for (int r = 3; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 4; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

inline std::array<double, 4> mat_vec4(const Mat4& a, const std::array<double, 4>& x) {
  std::array<double, 4> y{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) y[r] += a[r][c] * x[c];
  }
  return y;
}

struct RefStats {
  double mean, median, max, stddev, p90, p99, min;
  std::size_t n, miss;
};

inline RefStats ref_stats(std::span<const std::int64_t> us, std::int64_t deadline_us) {
  if (us.empty()) throw std::invalid_argument("ref_stats: empty");
  std::vector<std::int64_t> sorted(us.begin(), us.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  const auto rank = [&](int pct) {
    std::size_t r = (static_cast<std::size_t>(pct) * n + 99) / 100;  // ceil(pct*n/100)
    r = std::max<std::size_t>(1, std::min(r, n));
    return static_cast<double>(sorted[r - 1]);
  };

  RefStats s{};
  s.n = n;
  double sum = 0.0;
  for (std::int64_t v : us) sum += static_cast<double>(v);
  s.mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (std::int64_t v : us) {
    const double d = static_cast<double>(v) - s.mean;
    sq += d * d;
  }
  s.stddev = std::sqrt(sq / static_cast<double>(n));
  s.median = rank(50);
  s.p90 = rank(90);
  s.p99 = rank(99);
  s.min = static_cast<double>(sorted.front());
  s.max = static_cast<double>(sorted.back());
  s.miss = static_cast<std::size_t>(
      std::count_if(us.begin(), us.end(),
                    [deadline_us](std::int64_t v) { return v > deadline_us; }));
  return s;
}

}  // namespace oracle
