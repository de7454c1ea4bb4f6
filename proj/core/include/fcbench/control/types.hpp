#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace fcbench::control {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

// World-frame translation plus ZYX Euler attitude (roll, pitch, yaw) and
// body-frame angular velocity. The simulator keeps roll/pitch inside
// (-pi/2, pi/2) and wraps yaw to (-pi, pi].
struct VehicleState {
  Vec3 position{Vec3::Zero()};    // m
  Vec3 velocity{Vec3::Zero()};    // m/s
  Vec3 attitude{Vec3::Zero()};    // rad: roll, pitch, yaw
  Vec3 body_rates{Vec3::Zero()};  // rad/s

  bool is_finite() const {
    return position.allFinite() && velocity.allFinite() && attitude.allFinite() &&
           body_rates.allFinite();
  }
};

struct ControlReference {
  Vec3 position{Vec3::Zero()};  // m
  double yaw{0.0};              // rad
};

// Total desired force on the vehicle in the world frame. The position
// controller always commands a strictly positive vertical component.
struct ForceCommand {
  Vec3 force{Vec3::Zero()};  // N
};

struct TorqueCommand {
  Vec3 torque{Vec3::Zero()};  // N*m, body frame
};

// Rotor order: front-right, back-left, front-left, back-right (X layout,
// body x forward / y left / z up). Rotors 0,1 spin counter-clockwise,
// rotors 2,3 clockwise.
struct RotorSpeeds {
  Vec4 speeds{Vec4::Zero()};  // rad/s, each in [0, rotor_speed_max]
};

struct VehicleParams {
  double mass{1.0};                // kg
  double gravity{9.81};            // m/s^2
  Vec3 inertia{0.01, 0.01, 0.02};  // kg*m^2, body-axis diagonal
  double arm_length{0.25};         // m, hub center to rotor axis
  double thrust_coeff{1e-5};       // N*s^2/rad^2, rotor thrust = k_f * w^2
  double drag_torque_coeff{2e-7};  // N*m*s^2/rad^2, rotor drag torque = k_m * w^2
  double rotor_speed_max{1000.0};  // rad/s

  double max_total_thrust() const {
    return 4.0 * thrust_coeff * rotor_speed_max * rotor_speed_max;
  }

  // Throws std::invalid_argument unless all parameters are strictly positive
  // and the envelope admits hover (4*k_f*w_max^2 > m*g).
  void validate() const;
};

struct ControllerGains {
  Vec3 kp_pos{4.0, 4.0, 4.0};
  Vec3 kd_pos{4.0, 4.0, 4.0};
  Vec3 kp_att{100.0, 100.0, 25.0};
  Vec3 kd_att{20.0, 20.0, 10.0};
  Vec3 tau_max{3.0, 3.0, 0.4};  // N*m, per-axis torque saturation

  void validate() const;  // throws std::invalid_argument on negative entries
};

class ControlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The attitude controller cannot extract a tilt direction from a
// (near-)zero force command; the allocator downstream would divide by zero.
class DegenerateForceError : public ControlError {
 public:
  using ControlError::ControlError;
};

// Commanded thrust lies outside the actuator envelope (0, 4*k_f*w_max^2].
class InfeasibleCommandError : public ControlError {
 public:
  using ControlError::ControlError;
};

}  // namespace fcbench::control
