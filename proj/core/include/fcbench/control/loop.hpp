#pragma once

#include <cstdint>
#include <utility>

#include "fcbench/control/control.hpp"
#include "fcbench/control/dynamics.hpp"

namespace fcbench::control {

// One attitude-rate cycle of the cascaded stack: attitude controller ->
// allocator -> one dynamics step. The outer-loop force command is taken as a
// cached input so the call has a fixed, allocation-free code path. The
// allocator thrust is |F| (the vehicle tilts to align body z with F).
// Controller/allocator errors propagate.
std::pair<RotorSpeeds, VehicleState> fcs_attitude_tick(const VehicleState& state,
                                                       const ControlReference& ref,
                                                       const ForceCommand& cached_force,
                                                       const ControllerGains& gains,
                                                       const VehicleParams& params, double dt);

// Closed-loop driver around fcs_attitude_tick. The position controller
// refreshes the cached force command every outer_divisor ticks (default 5,
// i.e. 50 Hz against the 250 Hz inner loop); every tick then runs the
// attitude chain and advances the simulated vehicle. Fully deterministic:
// identical configurations produce bit-identical trajectories.
class FcsLoop {
 public:
  struct Config {
    VehicleParams params{};
    ControllerGains gains{};
    ControlReference ref{};
    double dt{0.004};       // s, one inner period
    int outer_divisor{5};   // inner ticks per position-loop update
  };

  explicit FcsLoop(Config cfg, VehicleState initial = VehicleState{});

  // Runs one inner-loop cycle and returns the rotor command it applied.
  RotorSpeeds tick();

  void reset(const VehicleState& initial);

  const VehicleState& state() const { return state_; }
  const ForceCommand& cached_force() const { return force_; }
  std::uint64_t ticks() const { return tick_count_; }
  double position_error() const { return (cfg_.ref.position - state_.position).norm(); }
  const Config& config() const { return cfg_; }

 private:
  Config cfg_;
  VehicleState state_;
  ForceCommand force_;
  std::uint64_t tick_count_{0};
};

}  // namespace fcbench::control
