#include "fcbench/control/loop.hpp"

namespace fcbench::control {

std::pair<RotorSpeeds, VehicleState> fcs_attitude_tick(const VehicleState& state,
                                                       const ControlReference& ref,
                                                       const ForceCommand& cached_force,
                                                       const ControllerGains& gains,
                                                       const VehicleParams& params, double dt) {
  const TorqueCommand tau = attitude_controller(ref.yaw, cached_force, state, gains, params);
  const RotorSpeeds rotors = control_allocator(cached_force.force.norm(), tau, params);
  VehicleState next = dynamics_step(state, rotors, params, dt);
  return {rotors, next};
}

FcsLoop::FcsLoop(Config cfg, VehicleState initial) : cfg_(std::move(cfg)), state_(initial) {
  cfg_.params.validate();
  cfg_.gains.validate();
  if (cfg_.outer_divisor < 1) {
    throw std::invalid_argument("FcsLoop: outer_divisor must be >= 1");
  }
  force_ = position_controller(cfg_.ref, state_, cfg_.gains, cfg_.params);
}

RotorSpeeds FcsLoop::tick() {
  if (tick_count_ % static_cast<std::uint64_t>(cfg_.outer_divisor) == 0) {
    force_ = position_controller(cfg_.ref, state_, cfg_.gains, cfg_.params);
  }
  auto [rotors, next] =
      fcs_attitude_tick(state_, cfg_.ref, force_, cfg_.gains, cfg_.params, cfg_.dt);
  state_ = next;
  ++tick_count_;
  return rotors;
}

void FcsLoop::reset(const VehicleState& initial) {
  state_ = initial;
  tick_count_ = 0;
  force_ = position_controller(cfg_.ref, state_, cfg_.gains, cfg_.params);
}

}  // namespace fcbench::control
