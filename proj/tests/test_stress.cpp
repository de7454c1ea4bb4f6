#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>
#include <thread>

#include "fcbench/rt/policy.hpp"
#include "fcbench/stress/injector.hpp"
#include "fcbench/stress/profile.hpp"

using namespace fcbench::stress;

namespace {

// Small, sandbox-friendly profile for the live tests.
StressProfile tiny_profile() {
  StressProfile p;
  p.cpu_workers = 1;
  p.vm_workers = 1;
  p.vm_fraction = 0.01;
  p.switch_pairs = 1;
  p.fork_workers = 1;
  p.measurement_core = fcbench::rt::online_cpu_count() - 1;
  for (int c = 0; c < fcbench::rt::online_cpu_count(); ++c) {
    if (c != p.measurement_core) p.allowed_cores.push_back(c);
  }
  return p;
}

std::size_t thread_count() {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator("/proc/self/task")) {
    (void)entry;
    ++n;
  }
  return n;
}

// Test-side parse-back oracle for the emitted stress-ng command line.
StressProfile parse_command(const std::string& cmd) {
  StressProfile p;
  p.cpu_workers = p.vm_workers = p.switch_pairs = p.fork_workers = 0;
  std::istringstream ss(cmd);
  std::string tok;
  ss >> tok;  // "stress-ng"
  while (ss >> tok) {
    if (tok == "--cpu") {
      ss >> p.cpu_workers;
    } else if (tok == "--cpu-method") {
      ss >> tok;
    } else if (tok == "--vm") {
      ss >> p.vm_workers;
    } else if (tok == "--vm-bytes") {
      ss >> tok;  // "75%"
      p.vm_fraction = std::stod(tok.substr(0, tok.size() - 1)) / 100.0;
    } else if (tok == "--switch") {
      ss >> p.switch_pairs;
    } else if (tok == "--fork") {
      ss >> p.fork_workers;
    } else if (tok == "--taskset") {
      ss >> tok;
      std::istringstream cores(tok);
      std::string c;
      while (std::getline(cores, c, ',')) p.allowed_cores.push_back(std::stoi(c));
    } else if (tok == "--timeout") {
      ss >> tok;  // "10s"
      p.duration = std::chrono::seconds(std::stol(tok.substr(0, tok.size() - 1)));
    }
  }
  return p;
}

}  // namespace

TEST_CASE("profile validation") {
  StressProfile p = tiny_profile();
  CHECK_NOTHROW(p.validate());

  StressProfile neg = p;
  neg.cpu_workers = -1;
  CHECK_THROWS_AS(neg.validate(), StressError);

  StressProfile frac = p;
  frac.vm_fraction = 0.95;
  CHECK_THROWS_AS(frac.validate(), StressError);
  frac.vm_fraction = 0.0;
  CHECK_THROWS_AS(frac.validate(), StressError);

  StressProfile empty_cores = p;
  empty_cores.allowed_cores.clear();
  CHECK_THROWS_AS(empty_cores.validate(), StressError);
}

TEST_CASE("allowed cores touching the measurement core is an affinity violation") {
  StressProfile p = tiny_profile();
  p.allowed_cores = {p.measurement_core};
  try {
    p.validate();
    FAIL("expected StressError");
  } catch (const StressError& e) {
    CHECK(e.code() == StressErrc::affinity_violation);
  }
}

TEST_CASE("paper defaults match the published stress composition") {
  const StressProfile p = StressProfile::paper_defaults(0);
  CHECK(p.cpu_workers == 4);
  CHECK(p.vm_workers == 2);
  CHECK(p.vm_fraction == 0.75);
  CHECK(p.switch_pairs > 0);
  CHECK(p.fork_workers > 0);
  for (int c : p.allowed_cores) CHECK(c != 0);
}

TEST_CASE("external command renders the paper profile") {
  StressProfile p = StressProfile::paper_defaults(0);
  p.allowed_cores = {1, 2, 3};
  const std::string cmd = external_command(p);
  CHECK(cmd.find("stress-ng") == 0);
  CHECK(cmd.find("--cpu 4") != std::string::npos);
  CHECK(cmd.find("--cpu-method matrixprod") != std::string::npos);
  CHECK(cmd.find("--vm 2") != std::string::npos);
  CHECK(cmd.find("--vm-bytes 75%") != std::string::npos);
  CHECK(cmd.find("--taskset 1,2,3") != std::string::npos);
}

TEST_CASE("external command: empty profile carries no stressor flags") {
  StressProfile p;
  p.cpu_workers = p.vm_workers = p.switch_pairs = p.fork_workers = 0;
  p.allowed_cores.clear();
  const std::string cmd = external_command(p);
  CHECK(cmd == "stress-ng");
}

TEST_CASE("external command round-trips through the parse-back oracle") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> count(0, 8);
  std::uniform_int_distribution<int> pct(1, 90);
  std::uniform_int_distribution<int> secs(0, 120);

  for (int trial = 0; trial < 100; ++trial) {
    StressProfile p;
    p.cpu_workers = count(rng);
    p.vm_workers = count(rng);
    p.vm_fraction = pct(rng) / 100.0;  // whole percents render losslessly
    p.switch_pairs = count(rng);
    p.fork_workers = count(rng);
    p.allowed_cores = {0, 1, 3};
    p.duration = std::chrono::seconds(secs(rng));

    const StressProfile back = parse_command(external_command(p));
    CHECK(back.cpu_workers == p.cpu_workers);
    CHECK(back.vm_workers == p.vm_workers);
    if (p.vm_workers > 0) {
      CHECK(back.vm_fraction == doctest::Approx(p.vm_fraction));
    }
    CHECK(back.switch_pairs == p.switch_pairs);
    CHECK(back.fork_workers == p.fork_workers);
    CHECK(back.allowed_cores == p.allowed_cores);
    if (p.duration.count() > 0) CHECK(back.duration == p.duration);
  }
}

TEST_CASE("zero-count profile starts and stops immediately") {
  StressProfile p = tiny_profile();
  p.cpu_workers = p.vm_workers = p.switch_pairs = p.fork_workers = 0;
  auto handle = start_stress(p);
  CHECK(handle.worker_count() == 0);
  const StressSummary summary = handle.stop();
  CHECK(summary.workers.empty());
  CHECK(summary.stragglers == 0);
}

TEST_CASE("live stress: pinning, liveness, teardown and idempotent stop") {
  const std::size_t baseline_threads = thread_count();
  StressProfile p = tiny_profile();
  auto handle = start_stress(p);
  REQUIRE(handle.worker_count() == 5);  // 1 cpu + 1 vm + one switch pair + 1 fork

  // containment: no worker thread may ever report the measurement core
  for (int probe = 0; probe < 5; ++probe) {
    for (const auto& cores : handle.sample_affinities()) {
      REQUIRE_FALSE(cores.empty());
      for (int c : cores) CHECK(c != p.measurement_core);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }

  // liveness: every worker advances between two observations ~1 s apart
  const auto before = handle.loop_counts();
  std::this_thread::sleep_for(std::chrono::seconds(1));
  const auto after = handle.loop_counts();
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] > before[i]);

  const StressSummary summary = handle.stop();
  CHECK(summary.stragglers == 0);
  CHECK_FALSE(summary.already_stopped);
  for (const auto& w : summary.workers) CHECK(w.loops > 0);

  const StressSummary again = handle.stop();
  CHECK(again.already_stopped);

  // clean teardown: thread count returns to the pre-start baseline
  for (int i = 0; i < 100 && thread_count() != baseline_threads; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(thread_count() == baseline_threads);
}

TEST_CASE("duration-bounded stress stops on its own") {
  StressProfile p = tiny_profile();
  p.vm_workers = 0;
  p.fork_workers = 0;
  p.duration = std::chrono::seconds(1);
  auto handle = start_stress(p);
  std::this_thread::sleep_for(std::chrono::milliseconds(1600));
  const auto counts_then = handle.loop_counts();
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  const auto counts_now = handle.loop_counts();
  CHECK(counts_then == counts_now);  // workers idled out at the deadline
  const StressSummary summary = handle.stop();
  CHECK(summary.stragglers == 0);
}
