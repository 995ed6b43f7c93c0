// Rotor thrust/torque model, propulsive wrench composition, rigid-body state
// derivative, and fixed-step RK4 integration.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "tiltquad/geometry.hpp"
#include "tiltquad/types.hpp"

namespace tiltquad {

struct VehicleParams {
  double mass = 2.045;                        // kg
  Mat3 inertia = (Mat3() << 0.02, 0, 0,
                            0, 0.02, 0,
                            0, 0, 0.04).finished();  // kg m^2
  double arm_length = 0.25;                   // m, rotor distance from CoM
  double thrust_coeff = 1.0e-5;               // N s^2/rad^2, T = k_T w^2
  double torque_ratio = 0.016;                // m, Q = k_Q T
  Mat3 drag_translational = 0.10 * Mat3::Identity();  // N s/m
  Mat3 drag_rotational = 0.01 * Mat3::Identity();     // N m s/rad
  double beta_max = deg2rad(40.0);            // rad, tilt range
  double thrust_max = 13.0;                   // N, per rotor
  double rotor_speed_max = 1140.175425099138; // rad/s, sqrt(thrust_max/k_T)
  double servo_rate_max = 20.94;              // rad/s
  double servo_trim = 0.0;                    // rad, constant additive tilt trim
  bool body_frame_drag = false;               // apply A_T in body frame

  double weight() const { return mass * kGravity; }

  // Largest per-rotor thrust the model will command; rotor speed and
  // structural limits both apply.
  double thrust_ceiling() const {
    const double speed_limited = thrust_coeff * rotor_speed_max * rotor_speed_max;
    return std::min(thrust_max, speed_limited);
  }

  void validate() const {
    if (!(mass > 0.0)) throw ConfigError("vehicle: mass must be > 0");
    if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
      throw ConfigError("vehicle: inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw ConfigError("vehicle: inertia must be positive definite");
    }
    if (!(arm_length > 0.0)) throw ConfigError("vehicle: arm_length must be > 0");
    if (!(thrust_coeff > 0.0)) throw ConfigError("vehicle: thrust_coeff must be > 0");
    if (torque_ratio < 0.0) throw ConfigError("vehicle: torque_ratio must be >= 0");
    if (drag_translational.diagonal().minCoeff() < 0.0 ||
        drag_rotational.diagonal().minCoeff() < 0.0) {
      throw ConfigError("vehicle: drag diagonals must be >= 0");
    }
    if (!(beta_max > 0.0) || beta_max > deg2rad(40.0) + 1e-12) {
      throw ConfigError("vehicle: beta_max must be in (0, 40 deg]");
    }
    if (!(thrust_max > 0.0)) throw ConfigError("vehicle: thrust_max must be > 0");
    if (!(servo_rate_max > 0.0)) throw ConfigError("vehicle: servo_rate_max must be > 0");
  }
};

// Full kinematic state.  velocity is expressed in the world frame,
// body_rate in the body frame.
struct VehicleState {
  Vec3 position = Vec3::Zero();    // m, world
  EulerAngles attitude;            // rad
  Vec3 velocity = Vec3::Zero();    // m/s, world
  Vec3 body_rate = Vec3::Zero();   // rad/s, body

  bool finite() const {
    return position.allFinite() && velocity.allFinite() &&
           body_rate.allFinite() && std::isfinite(attitude.roll) &&
           std::isfinite(attitude.pitch) && std::isfinite(attitude.yaw);
  }
};

// Signed rotor speeds (rotors 1,2 spin positive; 3,4 negative) and tilt
// angles about each arm axis.
struct ActuatorCommands {
  std::array<double, 4> rotor_speed = {0, 0, 0, 0};  // rad/s
  std::array<double, 4> tilt = {0, 0, 0, 0};         // rad
};

inline constexpr std::array<double, 4> kRotorSpinSign = {1.0, 1.0, -1.0, -1.0};

// Body-frame torque/force pair.
struct Wrench {
  Vec3 torque = Vec3::Zero();  // N m
  Vec3 force = Vec3::Zero();   // N

  Vec6 to_vector() const {
    Vec6 v;
    v << torque, force;
    return v;
  }
  static Wrench from_vector(const Vec6& v) {
    return {v.head<3>(), v.tail<3>()};
  }
};

struct Disturbance {
  Vec3 force_world = Vec3::Zero();   // N
  Vec3 torque_body = Vec3::Zero();   // N m
};

// T = k_T w^2, Q = k_Q T (torque_ratio has units of meters).
inline std::pair<double, double> rotor_thrust_torque(double rotor_speed,
                                                     const VehicleParams& p) {
  const double thrust = p.thrust_coeff * rotor_speed * rotor_speed;
  return {thrust, p.torque_ratio * thrust};
}

// Thrust vector of a tilted rotor in its own frame: no longitudinal
// component, lateral T sin(beta), vertical T cos(beta).
inline Vec3 rotor_force_rotor_frame(double thrust, double beta) {
  return {0.0, thrust * std::sin(beta), thrust * std::cos(beta)};
}

// Sums the rotor thrust vectors into a body-frame wrench.  The torque uses
// the same sign convention as the effectiveness matrix: the yaw moment from
// the lateral forces carries a uniform -l factor.
inline Wrench propulsive_wrench(const ActuatorCommands& cmds,
                                const VehicleParams& p) {
  std::array<double, 4> f_lat{};
  std::array<double, 4> f_ver{};
  Wrench w;
  for (int i = 0; i < kNumRotors; ++i) {
    const double thrust = rotor_thrust_torque(cmds.rotor_speed[i], p).first;
    const Vec3 f_rotor = rotor_force_rotor_frame(thrust, cmds.tilt[i]);
    f_lat[i] = f_rotor.y();
    f_ver[i] = f_rotor.z();
    w.force += rotor_frame(i + 1) * f_rotor;
  }
  const double kxl = kAxisFactor * p.arm_length;
  w.torque.x() = kxl * (-f_ver[0] + f_ver[1] + f_ver[2] - f_ver[3]);
  w.torque.y() = kxl * (-f_ver[0] + f_ver[1] - f_ver[2] + f_ver[3]);
  w.torque.z() =
      p.torque_ratio * (-f_ver[0] - f_ver[1] + f_ver[2] + f_ver[3]) -
      p.arm_length * (f_lat[0] + f_lat[1] + f_lat[2] + f_lat[3]);
  return w;
}

struct StateDerivative {
  Vec3 position_dot = Vec3::Zero();
  Vec3 attitude_dot = Vec3::Zero();  // (roll, pitch, yaw) rates
  Vec3 velocity_dot = Vec3::Zero();
  Vec3 body_rate_dot = Vec3::Zero();
};

inline StateDerivative state_derivative(const VehicleState& s,
                                        const Wrench& propulsion,
                                        const Disturbance& dist,
                                        const VehicleParams& p) {
  StateDerivative d;
  const Mat3 r = euler_to_rotation(s.attitude);

  Vec3 drag_force;
  if (p.body_frame_drag) {
    drag_force = r * (p.drag_translational * (r.transpose() * s.velocity));
  } else {
    drag_force = p.drag_translational * s.velocity;
  }

  d.position_dot = s.velocity;
  d.velocity_dot = Vec3(0.0, 0.0, -kGravity) +
                   (r * propulsion.force - drag_force + dist.force_world) / p.mass;
  d.attitude_dot = euler_rate_matrix(s.attitude) * s.body_rate;

  const Vec3 momentum = p.inertia * s.body_rate;
  d.body_rate_dot = p.inertia.inverse() *
                    (-s.body_rate.cross(momentum) + propulsion.torque -
                     p.drag_rotational * s.body_rate + dist.torque_body);
  return d;
}

namespace detail {

inline VehicleState advance(const VehicleState& s, const StateDerivative& d,
                            double dt) {
  VehicleState out;
  out.position = s.position + dt * d.position_dot;
  out.velocity = s.velocity + dt * d.velocity_dot;
  out.attitude.roll = s.attitude.roll + dt * d.attitude_dot.x();
  out.attitude.pitch = s.attitude.pitch + dt * d.attitude_dot.y();
  out.attitude.yaw = s.attitude.yaw + dt * d.attitude_dot.z();
  out.body_rate = s.body_rate + dt * d.body_rate_dot;
  return out;
}

}  // namespace detail

// Classical fourth-order Runge-Kutta step with the actuator commands held
// constant.  Euler angles are re-wrapped afterwards.  time_s is only used to
// annotate divergence errors.
inline VehicleState step(const VehicleState& s, const ActuatorCommands& cmds,
                         const Disturbance& dist, const VehicleParams& p,
                         double dt, double time_s = 0.0) {
  if (!(dt > 0.0) || dt > 0.01) {
    throw std::invalid_argument("step: dt must be in (0, 0.01] s");
  }
  const Wrench w = propulsive_wrench(cmds, p);

  const StateDerivative k1 = state_derivative(s, w, dist, p);
  const StateDerivative k2 =
      state_derivative(detail::advance(s, k1, 0.5 * dt), w, dist, p);
  const StateDerivative k3 =
      state_derivative(detail::advance(s, k2, 0.5 * dt), w, dist, p);
  const StateDerivative k4 =
      state_derivative(detail::advance(s, k3, dt), w, dist, p);

  StateDerivative combined;
  combined.position_dot =
      (k1.position_dot + 2.0 * k2.position_dot + 2.0 * k3.position_dot +
       k4.position_dot) / 6.0;
  combined.attitude_dot =
      (k1.attitude_dot + 2.0 * k2.attitude_dot + 2.0 * k3.attitude_dot +
       k4.attitude_dot) / 6.0;
  combined.velocity_dot =
      (k1.velocity_dot + 2.0 * k2.velocity_dot + 2.0 * k3.velocity_dot +
       k4.velocity_dot) / 6.0;
  combined.body_rate_dot =
      (k1.body_rate_dot + 2.0 * k2.body_rate_dot + 2.0 * k3.body_rate_dot +
       k4.body_rate_dot) / 6.0;

  VehicleState out = detail::advance(s, combined, dt);
  out.attitude = out.attitude.wrapped();
  if (!out.finite()) {
    throw IntegrationDivergedError("step: state became non-finite", time_s);
  }
  return out;
}

enum class ServoModel { Instantaneous, RateLimited };

// Slews each tilt angle toward its command.  Instantaneous mode passes the
// command through.
inline std::array<double, 4> servo_filter(const std::array<double, 4>& beta_cmd,
                                          const std::array<double, 4>& beta_prev,
                                          double dt, const VehicleParams& p,
                                          ServoModel model = ServoModel::Instantaneous) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("servo_filter: dt must be > 0");
  }
  if (model == ServoModel::Instantaneous) {
    return beta_cmd;
  }
  const double max_delta = p.servo_rate_max * dt;
  std::array<double, 4> out{};
  for (size_t i = 0; i < out.size(); ++i) {
    const double delta = std::clamp(beta_cmd[i] - beta_prev[i], -max_delta, max_delta);
    out[i] = beta_prev[i] + delta;
  }
  return out;
}

}  // namespace tiltquad
