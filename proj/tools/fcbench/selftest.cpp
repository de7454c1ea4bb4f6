#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "fcbench/control/control.hpp"
#include "fcbench/control/loop.hpp"
#include "fcbench/rt/clock.hpp"
#include "fcbench/rt/executor.hpp"
#include "fcbench/stats/stats.hpp"

namespace fcbench::tool {

namespace {

struct CheckReporter {
  std::ostream& log;
  int failures{0};

  void operator()(const std::string& name, bool ok, const std::string& detail) {
    log << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) log << ": " << detail;
    log << "\n";
    if (!ok) ++failures;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_allocator_round_trip(const RunSettings& s, CheckReporter& report) {
  const Eigen::Matrix4d mix = control::mixing_matrix(s.vehicle);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> speed(0.05 * s.vehicle.rotor_speed_max,
                                               0.95 * s.vehicle.rotor_speed_max);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::Vector4d squared;
    for (int i = 0; i < 4; ++i) {
      const double w = speed(rng);
      squared[i] = w * w;
    }
    const Eigen::Vector4d cmd = mix * squared;
    control::TorqueCommand tau;
    tau.torque = {cmd[1], cmd[2], cmd[3]};
    const control::RotorSpeeds rotors = control::control_allocator(cmd[0], tau, s.vehicle);
    const Eigen::Vector4d back = mix * rotors.speeds.array().square().matrix();
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst,
                       std::abs(back[i] - cmd[i]) / std::max(std::abs(cmd[i]), 1e-12));
    }
  }
  report("allocator-round-trip", worst <= 1e-9,
         "worst relative recomposition error " + fmt(worst));

  const double hover = s.vehicle.mass * s.vehicle.gravity;
  const control::RotorSpeeds r = control::control_allocator(hover, {}, s.vehicle);
  const bool equal = r.speeds[0] == r.speeds[1] && r.speeds[1] == r.speeds[2] &&
                     r.speeds[2] == r.speeds[3];
  report("allocator-hover-symmetry", equal,
         "hover speeds " + fmt(r.speeds[0]) + " rad/s");
}

void check_hover_hold(const RunSettings& s, CheckReporter& report) {
  try {
    control::FcsLoop::Config cfg;
    cfg.params = s.vehicle;
    cfg.gains = s.gains;
    cfg.outer_divisor = s.outer_divisor;
    control::FcsLoop loop(cfg);
    double worst = 0.0;
    for (int i = 0; i < 2500; ++i) {
      loop.tick();
      worst = std::max(worst, loop.position_error());
    }
    report("hover-hold", worst < 1e-6,
           "max position error " + fmt(worst) + " m over 10 simulated seconds");
  } catch (const std::exception& e) {
    report("hover-hold", false, e.what());
  }
}

void check_step_response(const RunSettings& s, CheckReporter& report) {
  try {
    control::FcsLoop::Config cfg;
    cfg.params = s.vehicle;
    cfg.gains = s.gains;
    cfg.outer_divisor = s.outer_divisor;
    const auto run = [&cfg] {
      control::VehicleState start;
      start.position = {1.0, 0.0, 0.0};
      control::FcsLoop loop(cfg, start);
      std::vector<double> trail;
      for (int i = 0; i < 2500; ++i) {
        loop.tick();
        trail.push_back(loop.state().position.x());
      }
      return std::pair(loop.position_error(), trail);
    };
    const auto [err1, trail1] = run();
    const auto [err2, trail2] = run();
    report("step-response", err1 < 0.05,
           "1 m step settles to " + fmt(err1) + " m after 10 simulated seconds");
    report("determinism", err1 == err2 && trail1 == trail2,
           "two closed-loop runs are bit-identical");
  } catch (const std::exception& e) {
    report("step-response", false, e.what());
  }
}

void check_executor_sim(CheckReporter& report) {
  rt::TaskSpec spec;
  spec.iterations = 1000;

  {
    rt::SimClock clock;
    auto* clk = &clock;
    const auto series = rt::run_periodic(spec, [clk] { clk->advance(100'000); }, clock);
    bool all_zero = series.samples.size() == 1000;
    for (const auto& sample : series.samples) {
      all_zero = all_zero && sample.latency_ns() == 0 && !sample.deadline_missed;
    }
    report("executor-ideal-clock", all_zero, "zero-noise clock gives all-zero latencies");
  }
  {
    rt::SimClock clock;
    std::vector<std::int64_t> oversleeps(1000, 0);
    oversleeps[100] = 3'000'000;
    clock.set_oversleeps(oversleeps);
    auto* clk = &clock;
    const auto series = rt::run_periodic(spec, [clk] { clk->advance(1'500'000); }, clock);
    bool drift_free = true;
    bool late_as_expected = true;
    for (const auto& sample : series.samples) {
      drift_free = drift_free &&
                   sample.scheduled_wake_ns ==
                       series.meta.t0_ns +
                           static_cast<std::int64_t>(sample.iteration) * series.meta.period_ns;
      // the overrun of 100 spills its remainder into 101; every other wake is exact
      std::int64_t want = 0;
      if (sample.iteration == 100) want = 3'000'000;
      if (sample.iteration == 101) want = 500'000;
      late_as_expected = late_as_expected && sample.latency_ns() == want;
    }
    const bool ok = late_as_expected && series.miss_count() == 1 &&
                    series.samples[100].deadline_missed && drift_free;
    report("executor-oversleep", ok,
           "one injected 3 ms oversleep -> exactly one miss, no schedule drift");
  }
}

void check_stats_oracle(CheckReporter& report) {
  std::vector<std::int64_t> ranks(100);
  for (int i = 0; i < 100; ++i) ranks[static_cast<std::size_t>(i)] = i + 1;
  const auto st = stats::compute_stats(ranks, 4000);
  bool ok = st.median_us == 50.0 && st.p90_us == 90.0 && st.p99_us == 99.0 && st.max_us == 100.0;

  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::int64_t> value(0, 10000);
  for (int trial = 0; trial < 50 && ok; ++trial) {
    std::vector<std::int64_t> series(1 + rng() % 5000);
    for (auto& v : series) v = value(rng);
    const auto got = stats::compute_stats(series, 4000);
    std::vector<std::int64_t> sorted = series;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = [&sorted](int pct) {
      std::size_t r = (static_cast<std::size_t>(pct) * sorted.size() + 99) / 100;
      r = std::max<std::size_t>(1, std::min(r, sorted.size()));
      return static_cast<double>(sorted[r - 1]);
    };
    ok = got.median_us == rank(50) && got.p90_us == rank(90) && got.p99_us == rank(99) &&
         got.max_us == static_cast<double>(sorted.back()) &&
         got.min_us == static_cast<double>(sorted.front());
  }
  report("stats-oracle", ok, "nearest-rank percentiles match a full-sort reference");

  const bool derived = stats::improvement_pct(9424, 3635) == 61.4 &&
                       stats::improvement_pct(1848, 224) == 87.9 &&
                       stats::jitter_fraction(224, 4000) == 5.6;
  report("stats-derived", derived, "published comparison metrics reproduce");
}

}  // namespace

int cmd_selftest(const RunSettings& settings, std::ostream& log) {
  CheckReporter report{log};
  check_allocator_round_trip(settings, report);
  check_hover_hold(settings, report);
  check_step_response(settings, report);
  check_executor_sim(report);
  check_stats_oracle(report);
  log << (report.failures == 0 ? "selftest: all checks passed\n"
                               : "selftest: FAILURES present\n");
  return report.failures == 0 ? kExitOk : kExitConfig;
}

}  // namespace fcbench::tool
