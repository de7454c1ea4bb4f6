#include "fcbench/control/dynamics.hpp"

#include <cmath>

#include "fcbench/control/control.hpp"

namespace fcbench::control {

namespace {

constexpr double kTiltLimit = M_PI / 2.0 - 1e-9;

struct Deriv {
  Vec3 dpos, dvel, datt, drates;
};

// Force/torque produced by the rotors, matching the mixing_matrix rows.
struct RotorWrench {
  double thrust;
  Vec3 torque;
};

RotorWrench rotor_wrench(const RotorSpeeds& rotors, const VehicleParams& p) {
  const Vec4 sq = rotors.speeds.array().square();
  const double d = p.arm_length / std::sqrt(2.0);
  RotorWrench w;
  w.thrust = p.thrust_coeff * sq.sum();
  w.torque.x() = p.thrust_coeff * d * (-sq[0] + sq[1] + sq[2] - sq[3]);
  w.torque.y() = p.thrust_coeff * d * (-sq[0] + sq[1] - sq[2] + sq[3]);
  w.torque.z() = p.drag_torque_coeff * (-sq[0] - sq[1] + sq[2] + sq[3]);
  return w;
}

Deriv derivative(const VehicleState& s, const RotorWrench& w, const VehicleParams& p) {
  const double sr = std::sin(s.attitude.x()), cr = std::cos(s.attitude.x());
  const double sp = std::sin(s.attitude.y()), cp = std::cos(s.attitude.y());
  const double sy = std::sin(s.attitude.z()), cy = std::cos(s.attitude.z());

  // body z axis in world coordinates, R = Rz(yaw)*Ry(pitch)*Rx(roll)
  const Vec3 body_z{cr * sp * cy + sr * sy, cr * sp * sy - sr * cy, cr * cp};

  Deriv d;
  d.dpos = s.velocity;
  d.dvel = (w.thrust / p.mass) * body_z - Vec3{0.0, 0.0, p.gravity};

  // Euler-angle kinematics; the roll/pitch clamp keeps us off the pitch
  // singularity at +-pi/2.
  const Vec3& wb = s.body_rates;
  const double tp = sp / cp;
  d.datt = Vec3{wb.x() + (wb.y() * sr + wb.z() * cr) * tp,
                wb.y() * cr - wb.z() * sr,
                (wb.y() * sr + wb.z() * cr) / cp};

  const Vec3 j_w = p.inertia.cwiseProduct(wb);
  d.drates = (w.torque - wb.cross(j_w)).cwiseQuotient(p.inertia);
  return d;
}

VehicleState advanced(const VehicleState& s, const Deriv& d, double h) {
  VehicleState out;
  out.position = s.position + h * d.dpos;
  out.velocity = s.velocity + h * d.dvel;
  out.attitude = s.attitude + h * d.datt;
  out.body_rates = s.body_rates + h * d.drates;
  return out;
}

}  // namespace

VehicleState dynamics_step(const VehicleState& state, const RotorSpeeds& rotors,
                           const VehicleParams& params, double dt) {
  if (!(dt > 0.0) || dt > 0.01) {
    throw std::invalid_argument("dynamics_step: dt must be in (0, 0.01] s");
  }
  const RotorWrench w = rotor_wrench(rotors, params);

  const Deriv k1 = derivative(state, w, params);
  const Deriv k2 = derivative(advanced(state, k1, dt / 2.0), w, params);
  const Deriv k3 = derivative(advanced(state, k2, dt / 2.0), w, params);
  const Deriv k4 = derivative(advanced(state, k3, dt), w, params);

  VehicleState next;
  const double h = dt / 6.0;
  next.position =
      state.position + h * (k1.dpos + 2.0 * k2.dpos + 2.0 * k3.dpos + k4.dpos);
  next.velocity =
      state.velocity + h * (k1.dvel + 2.0 * k2.dvel + 2.0 * k3.dvel + k4.dvel);
  next.attitude =
      state.attitude + h * (k1.datt + 2.0 * k2.datt + 2.0 * k3.datt + k4.datt);
  next.body_rates =
      state.body_rates + h * (k1.drates + 2.0 * k2.drates + 2.0 * k3.drates + k4.drates);

  next.attitude.x() = std::clamp(next.attitude.x(), -kTiltLimit, kTiltLimit);
  next.attitude.y() = std::clamp(next.attitude.y(), -kTiltLimit, kTiltLimit);
  next.attitude.z() = wrap_angle(next.attitude.z());
  return next;
}

}  // namespace fcbench::control
