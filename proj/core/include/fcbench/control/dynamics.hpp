#pragma once

#include "fcbench/control/types.hpp"

namespace fcbench::control {

// Advances the rigid-body 6-DOF model one fixed RK4 step. Rotor thrusts act
// along body z, gravity along world -z, and the rotational dynamics use the
// diagonal inertia with gyroscopic coupling and rotor drag torques. Rotor
// speeds are held constant across the step. The returned state has roll/pitch
// clamped inside (-pi/2, pi/2) and yaw wrapped to (-pi, pi].
// Throws std::invalid_argument unless 0 < dt <= 0.01 s.
VehicleState dynamics_step(const VehicleState& state, const RotorSpeeds& rotors,
                           const VehicleParams& params, double dt);

}  // namespace fcbench::control
