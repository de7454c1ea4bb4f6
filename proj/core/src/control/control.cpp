#include "fcbench/control/control.hpp"

#include <algorithm>
#include <cmath>

namespace fcbench::control {

namespace {

constexpr double kForceEpsilon = 1e-9;        // N, below this |F| has no usable direction
constexpr double kMinVerticalForce = 1e-6;    // N, keeps commanded thrust strictly positive

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("VehicleParams: ") + name +
                                " must be finite and > 0");
  }
}

}  // namespace

void VehicleParams::validate() const {
  require_positive(mass, "mass");
  require_positive(gravity, "gravity");
  require_positive(arm_length, "arm_length");
  require_positive(thrust_coeff, "thrust_coeff");
  require_positive(drag_torque_coeff, "drag_torque_coeff");
  require_positive(rotor_speed_max, "rotor_speed_max");
  for (int i = 0; i < 3; ++i) require_positive(inertia[i], "inertia");
  if (!(max_total_thrust() > mass * gravity)) {
    throw std::invalid_argument("VehicleParams: hover infeasible, 4*k_f*w_max^2 <= m*g");
  }
}

void ControllerGains::validate() const {
  auto check = [](const Vec3& v, const char* name) {
    if (!v.allFinite() || (v.array() < 0.0).any()) {
      throw std::invalid_argument(std::string("ControllerGains: ") + name +
                                  " must be finite and non-negative");
    }
  };
  check(kp_pos, "kp_pos");
  check(kd_pos, "kd_pos");
  check(kp_att, "kp_att");
  check(kd_att, "kd_att");
  check(tau_max, "tau_max");
}

double wrap_angle(double rad) {
  double w = std::remainder(rad, 2.0 * M_PI);
  if (w <= -M_PI) w = M_PI;
  return w;
}

ForceCommand position_controller(const ControlReference& ref, const VehicleState& state,
                                 const ControllerGains& gains, const VehicleParams& params) {
  const Vec3 err = ref.position - state.position;
  Vec3 f = params.mass * (params.gravity * Vec3::UnitZ() + gains.kp_pos.cwiseProduct(err) -
                          gains.kd_pos.cwiseProduct(state.velocity));
  f.z() = std::clamp(f.z(), kMinVerticalForce, params.max_total_thrust());
  return ForceCommand{f};
}

TorqueCommand attitude_controller(double yaw_ref, const ForceCommand& force,
                                  const VehicleState& state, const ControllerGains& gains,
                                  const VehicleParams& params) {
  const double norm = force.force.norm();
  if (norm < kForceEpsilon) {
    throw DegenerateForceError("attitude_controller: |F| below epsilon, no tilt direction");
  }
  const double sy = std::sin(yaw_ref);
  const double cy = std::cos(yaw_ref);
  const double roll_d = (force.force.x() * sy - force.force.y() * cy) / norm;
  const double pitch_d = (force.force.x() * cy + force.force.y() * sy) / norm;

  const Vec3 att_err{roll_d - state.attitude.x(), pitch_d - state.attitude.y(),
                     wrap_angle(yaw_ref - state.attitude.z())};
  Vec3 tau = params.inertia.cwiseProduct(gains.kp_att.cwiseProduct(att_err) -
                                         gains.kd_att.cwiseProduct(state.body_rates));
  tau = tau.cwiseMax(-gains.tau_max).cwiseMin(gains.tau_max);
  return TorqueCommand{tau};
}

Eigen::Matrix4d mixing_matrix(const VehicleParams& params) {
  const double kf = params.thrust_coeff;
  const double km = params.drag_torque_coeff;
  const double d = params.arm_length / std::sqrt(2.0);
  Eigen::Matrix4d a;
  // columns: front-right, back-left, front-left, back-right
  a << kf, kf, kf, kf,                                  // total thrust
      -kf * d, kf * d, kf * d, -kf * d,                 // roll moment
      -kf * d, kf * d, -kf * d, kf * d,                 // pitch moment
      -km, -km, km, km;                                 // yaw drag (CCW, CCW, CW, CW)
  return a;
}

RotorSpeeds control_allocator(double thrust, const TorqueCommand& tau,
                              const VehicleParams& params) {
  if (!(thrust > 0.0) || thrust > params.max_total_thrust()) {
    throw InfeasibleCommandError("control_allocator: thrust outside (0, 4*k_f*w_max^2]");
  }
  const double kf = params.thrust_coeff;
  const double km = params.drag_torque_coeff;
  const double d = params.arm_length / std::sqrt(2.0);

  // The mixing rows are mutually orthogonal, so A^-1 = A^T * D^-1 with
  // D = diag(4*kf^2, 4*(kf*d)^2, 4*(kf*d)^2, 4*km^2); per rotor this is a
  // signed sum of four scaled command terms.
  const double t = thrust / (4.0 * kf);
  const double rx = tau.torque.x() / (4.0 * kf * d);
  const double ry = tau.torque.y() / (4.0 * kf * d);
  const double rz = tau.torque.z() / (4.0 * km);

  Vec4 squared{t - rx - ry - rz,   // front-right (CCW)
               t + rx + ry - rz,   // back-left   (CCW)
               t + rx - ry + rz,   // front-left  (CW)
               t - rx + ry + rz};  // back-right  (CW)

  RotorSpeeds out;
  for (int i = 0; i < 4; ++i) {
    const double s = std::max(squared[i], 0.0);
    out.speeds[i] = std::min(std::sqrt(s), params.rotor_speed_max);
  }
  return out;
}

}  // namespace fcbench::control
