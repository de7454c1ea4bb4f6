#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "fcbench/control/control.hpp"
#include "fcbench/control/loop.hpp"
#include "fcbench/stats/stats.hpp"
#include "fcbench/trace/activation.hpp"
#include "fcbench/trace/parser.hpp"

namespace {

using namespace fcbench;

// The measured payload itself: one 250 Hz attitude cycle. Its walltime is the
// C term of the task model, so keeping an eye on it matters.
void BM_AttitudeTick(benchmark::State& state) {
  control::FcsLoop loop(control::FcsLoop::Config{},
                        control::VehicleState{.position = {0.5, -0.3, 0.2}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(loop.tick());
  }
}
BENCHMARK(BM_AttitudeTick);

void BM_PositionController(benchmark::State& state) {
  const control::VehicleParams params;
  const control::ControllerGains gains;
  control::ControlReference ref;
  ref.position = {1.0, 2.0, 3.0};
  control::VehicleState vs;
  for (auto _ : state) {
    benchmark::DoNotOptimize(control::position_controller(ref, vs, gains, params));
  }
}
BENCHMARK(BM_PositionController);

void BM_ControlAllocator(benchmark::State& state) {
  const control::VehicleParams params;
  control::TorqueCommand tau;
  tau.torque = {0.01, -0.02, 0.003};
  const double thrust = params.mass * params.gravity;
  for (auto _ : state) {
    benchmark::DoNotOptimize(control::control_allocator(thrust, tau, params));
  }
}
BENCHMARK(BM_ControlAllocator);

void BM_DynamicsStep(benchmark::State& state) {
  const control::VehicleParams params;
  control::VehicleState vs;
  vs.velocity = {0.1, 0.2, -0.1};
  control::RotorSpeeds rotors;
  rotors.speeds.setConstant(500.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vs = control::dynamics_step(vs, rotors, params, 0.004));
  }
}
BENCHMARK(BM_DynamicsStep);

void BM_ComputeStats(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> value(0, 10000);
  std::vector<std::int64_t> series(static_cast<std::size_t>(state.range(0)));
  for (auto& v : series) v = value(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::compute_stats(series, 4000));
  }
}
BENCHMARK(BM_ComputeStats)->Arg(10000);

const char* kTraceChunk =
    "          <idle>-0     [002]  200.000000: irq_handler_entry: irq=161 name=arch_timer\n"
    "          <idle>-0     [002]  200.000005: irq_softirq_raise: vec=1 [action=HRTIMER]\n"
    "          <idle>-0     [002]  200.000017: sched_wakeup: comm=ktimers pid=34 prio=98 "
    "target_cpu=002\n"
    "          <idle>-0     [002]  200.000054: sched_switch: prev_comm=swapper/2 prev_pid=0 "
    "prev_prio=120 prev_state=R ==> next_comm=ktimers next_pid=34 next_prio=98\n"
    "         ktimers-34    [002]  200.000093: sched_wakeup: comm=fcs pid=812 prio=120 "
    "target_cpu=002\n"
    "         ktimers-34    [002]  200.000115: sched_switch: prev_comm=ktimers prev_pid=34 "
    "prev_prio=98 prev_state=S ==> next_comm=fcs next_pid=812 next_prio=120\n";

void BM_ParseTrace(benchmark::State& state) {
  std::string blob;
  for (int i = 0; i < 100; ++i) blob += kTraceChunk;
  for (auto _ : state) {
    std::istringstream in(blob);
    benchmark::DoNotOptimize(trace::parse_trace(in));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(blob.size()));
}
BENCHMARK(BM_ParseTrace);

void BM_ClassifyActivations(benchmark::State& state) {
  std::string blob;
  for (int i = 0; i < 100; ++i) blob += kTraceChunk;
  std::istringstream in(blob);
  const auto parsed = trace::parse_trace(in);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace::classify_activations(parsed.events, "fcs"));
  }
}
BENCHMARK(BM_ClassifyActivations);

}  // namespace
