#pragma once

#include "fcbench/control/types.hpp"

namespace fcbench::control {

// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

// Outer-loop PD with gravity feedforward:
//   F = m * (g*z_hat + kp .* (r_ref - r) - kd .* v)
// The vertical component is clamped into (0, max_total_thrust] so the
// commanded force can always be realized by upward rotor thrust.
ForceCommand position_controller(const ControlReference& ref, const VehicleState& state,
                                 const ControllerGains& gains, const VehicleParams& params);

// Inner-loop PD on attitude error. Desired roll/pitch follow from the force
// direction under the small-angle mapping
//   roll_d  = (F_x*sin(yaw_ref) - F_y*cos(yaw_ref)) / |F|
//   pitch_d = (F_x*cos(yaw_ref) + F_y*sin(yaw_ref)) / |F|
// and the torque is tau = J .* (kp_att .* e_att - kd_att .* w_b), saturated
// per axis at tau_max. Throws DegenerateForceError when |F| is below 1e-9 N.
TorqueCommand attitude_controller(double yaw_ref, const ForceCommand& force,
                                  const VehicleState& state, const ControllerGains& gains,
                                  const VehicleParams& params);

// Mixing matrix A of the X configuration: A * (w_i^2) = (T, tau_x, tau_y, tau_z).
// Row 0 is total thrust (k_f each), rows 1-2 the roll/pitch moments
// (+-k_f*l/sqrt(2)), row 3 the yaw drag torque (+-k_m by spin direction).
Eigen::Matrix4d mixing_matrix(const VehicleParams& params);

// Solves the mixing system for the squared rotor speeds. The rows of A are
// mutually orthogonal, so the solve is the exact analytic inverse; within
// actuator limits the pre-clamp solution reproduces the command. Negative
// squared speeds are clamped to zero before the square root and speeds are
// capped at rotor_speed_max. Throws InfeasibleCommandError when thrust is
// outside (0, max_total_thrust].
RotorSpeeds control_allocator(double thrust, const TorqueCommand& tau,
                              const VehicleParams& params);

}  // namespace fcbench::control
