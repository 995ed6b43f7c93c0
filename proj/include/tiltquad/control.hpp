// Cascaded position/attitude control producing the wrench setpoint.
//
// Two modes mirror the two flight tests: Omnidirectional holds a level
// attitude setpoint and passes the full 3D thrust vector to allocation;
// Conventional derives a tilt attitude from the thrust direction and
// commands body-z thrust only.

#pragma once

#include <cmath>
#include <optional>

#include "tiltquad/geometry.hpp"
#include "tiltquad/types.hpp"
#include "tiltquad/vehicle.hpp"

namespace tiltquad {

enum class ControlMode { Omnidirectional, Conventional };

struct PidGains {
  Vec3 p = Vec3::Zero();
  Vec3 i = Vec3::Zero();
  Vec3 d = Vec3::Zero();
};

// Defaults are pole-placement picks for the stock vehicle, not measured
// values.  The rate loop emits angular acceleration; torque is recovered by
// scaling with the inertia matrix, so rate gains stay dimensionless PX4-style
// numbers and rate_scale sets the loop bandwidth.
struct ControllerGains {
  Vec3 position_p = Vec3::Constant(1.0);                 // 1/s
  PidGains velocity = {Vec3::Constant(3.0), Vec3::Constant(0.4),
                       Vec3::Constant(0.1)};
  Vec3 attitude_p = Vec3::Constant(6.0);                 // 1/s
  PidGains rate = {Vec3::Constant(0.15), Vec3::Constant(0.2),
                   Vec3::Constant(0.003)};
  double rate_scale = 250.0;                             // 1/s
  double velocity_integral_limit = 3.0;                  // m/s^2
  double rate_integral_limit = 10.0;                     // rad/s^2
  Vec3 torque_limit = Vec3(2.0, 2.0, 0.5);               // N m

  void validate() const {
    auto nonneg = [](const Vec3& v) { return v.minCoeff() >= 0.0; };
    if (!nonneg(position_p) || !nonneg(velocity.p) || !nonneg(velocity.i) ||
        !nonneg(velocity.d) || !nonneg(attitude_p) || !nonneg(rate.p) ||
        !nonneg(rate.i) || !nonneg(rate.d)) {
      throw ConfigError("gains must be >= 0");
    }
    if (!(velocity_integral_limit > 0.0) || !(rate_integral_limit > 0.0)) {
      throw ConfigError("integrator limits must be > 0");
    }
    if (!(rate_scale > 0.0) || torque_limit.minCoeff() <= 0.0) {
      throw ConfigError("rate_scale and torque limits must be > 0");
    }
  }
};

struct Setpoint {
  Vec3 position = Vec3::Zero();   // m, world
  double yaw = 0.0;               // rad
  std::optional<Vec3> velocity_ff;  // m/s
};

// Outer loop: position P cascaded into a velocity PID, producing the desired
// world-frame force.  Gravity compensation is included; the output norm is
// clamped to the total-thrust envelope with direction preserved.  The
// derivative term acts on measured acceleration, not on error.
class PositionController {
 public:
  PositionController(const ControllerGains& gains, const VehicleParams& params)
      : gains_(gains), params_(params) {}

  Vec3 update(const Setpoint& sp, const VehicleState& state, double dt) {
    if (!(dt > 0.0)) {
      throw std::invalid_argument("position_control: dt must be > 0");
    }
    Vec3 vel_sp = gains_.position_p.cwiseProduct(sp.position - state.position);
    if (sp.velocity_ff) {
      vel_sp += *sp.velocity_ff;
    }
    const Vec3 vel_err = vel_sp - state.velocity;

    Vec3 accel_meas = Vec3::Zero();
    if (prev_velocity_) {
      accel_meas = (state.velocity - *prev_velocity_) / dt;
    }
    prev_velocity_ = state.velocity;

    integral_ += gains_.velocity.i.cwiseProduct(vel_err) * dt;
    integral_ = integral_.cwiseMax(-gains_.velocity_integral_limit)
                    .cwiseMin(gains_.velocity_integral_limit);

    const Vec3 accel_cmd = gains_.velocity.p.cwiseProduct(vel_err) + integral_ -
                           gains_.velocity.d.cwiseProduct(accel_meas);

    Vec3 force = params_.mass * (accel_cmd + Vec3(0.0, 0.0, kGravity));
    const double envelope = 4.0 * params_.thrust_max;
    const double norm = force.norm();
    if (norm > envelope) {
      force *= envelope / norm;
    }
    return force;
  }

  void reset() {
    integral_.setZero();
    prev_velocity_.reset();
  }

  const Vec3& integral() const { return integral_; }

 private:
  ControllerGains gains_;
  VehicleParams params_;
  Vec3 integral_ = Vec3::Zero();
  std::optional<Vec3> prev_velocity_;
};

// Attitude setpoint selection.  Omnidirectional mode pins the setpoint at
// level attitude regardless of the thrust direction; Conventional mode tilts
// body-z onto the desired force direction at the commanded yaw.  min_force
// guards the direction extraction (callers pass a small fraction of hover
// weight).
inline EulerAngles attitude_setpoint(ControlMode mode, const Vec3& force_des,
                                     double yaw_sp, double min_force) {
  if (mode == ControlMode::Omnidirectional) {
    return {0.0, 0.0, 0.0};
  }
  const double norm = force_des.norm();
  if (!(norm > min_force)) {
    throw DegenerateDirectionError(
        "attitude_setpoint: thrust direction undefined for near-zero force");
  }
  const Vec3 in_yaw_frame = rot_z(yaw_sp).transpose() * force_des / norm;
  EulerAngles eta;
  eta.roll = std::asin(std::clamp(-in_yaw_frame.y(), -1.0, 1.0));
  eta.pitch = std::atan2(in_yaw_frame.x(), in_yaw_frame.z());
  eta.yaw = yaw_sp;
  return eta;
}

// Inner loop: attitude P producing a body-rate setpoint, then a rate PID
// emitting angular acceleration, converted to torque through the inertia.
// Attitude errors take the shortest angular path per axis.
class AttitudeController {
 public:
  AttitudeController(const ControllerGains& gains, const VehicleParams& params)
      : gains_(gains), params_(params) {}

  Vec3 update(const EulerAngles& eta_sp, const VehicleState& state, double dt) {
    if (!(dt > 0.0)) {
      throw std::invalid_argument("attitude_control: dt must be > 0");
    }
    const Vec3 att_err(wrap_pi(eta_sp.roll - state.attitude.roll),
                       wrap_pi(eta_sp.pitch - state.attitude.pitch),
                       wrap_pi(eta_sp.yaw - state.attitude.yaw));
    const Vec3 rate_sp = gains_.attitude_p.cwiseProduct(att_err);
    const Vec3 rate_err = rate_sp - state.body_rate;

    Vec3 rate_dot_meas = Vec3::Zero();
    if (prev_rate_) {
      rate_dot_meas = (state.body_rate - *prev_rate_) / dt;
    }
    prev_rate_ = state.body_rate;

    integral_ += gains_.rate_scale * gains_.rate.i.cwiseProduct(rate_err) * dt;
    integral_ = integral_.cwiseMax(-gains_.rate_integral_limit)
                    .cwiseMin(gains_.rate_integral_limit);

    const Vec3 accel_cmd =
        gains_.rate_scale * gains_.rate.p.cwiseProduct(rate_err) + integral_ -
        gains_.rate_scale * gains_.rate.d.cwiseProduct(rate_dot_meas);

    Vec3 torque = params_.inertia * accel_cmd;
    torque = torque.cwiseMax(-gains_.torque_limit).cwiseMin(gains_.torque_limit);
    return torque;
  }

  void reset() {
    integral_.setZero();
    prev_rate_.reset();
  }

  const Vec3& integral() const { return integral_; }

 private:
  ControllerGains gains_;
  VehicleParams params_;
  Vec3 integral_ = Vec3::Zero();
  std::optional<Vec3> prev_rate_;
};

// Projects the desired world force into the body-frame wrench handed to
// allocation.  Omnidirectional mode keeps the full 3D vector; Conventional
// mode commands its magnitude along body z only.
inline Wrench compose_wrench(ControlMode mode, const Vec3& force_des_world,
                             const Vec3& torque, const VehicleState& state) {
  Wrench w;
  w.torque = torque;
  if (mode == ControlMode::Omnidirectional) {
    w.force = euler_to_rotation(state.attitude).transpose() * force_des_world;
  } else {
    w.force = Vec3(0.0, 0.0, force_des_world.norm());
  }
  return w;
}

struct ControlOutput {
  Wrench wrench;
  Vec3 force_des_world = Vec3::Zero();
  EulerAngles attitude_sp;
};

// One control step: position loop, attitude setpoint, attitude loop, wrench
// composition, in that order.
class CascadedController {
 public:
  CascadedController(ControlMode mode, const ControllerGains& gains,
                     const VehicleParams& params)
      : mode_(mode),
        params_(params),
        position_(gains, params),
        attitude_(gains, params) {}

  ControlOutput update(const Setpoint& sp, const VehicleState& state, double dt) {
    ControlOutput out;
    out.force_des_world = position_.update(sp, state, dt);
    const double yaw_sp = mode_ == ControlMode::Omnidirectional ? 0.0 : sp.yaw;
    out.attitude_sp = attitude_setpoint(mode_, out.force_des_world, yaw_sp,
                                        1e-6 * params_.weight());
    const Vec3 torque = attitude_.update(out.attitude_sp, state, dt);
    out.wrench = compose_wrench(mode_, out.force_des_world, torque, state);
    return out;
  }

  void reset() {
    position_.reset();
    attitude_.reset();
  }

  ControlMode mode() const { return mode_; }

 private:
  ControlMode mode_;
  VehicleParams params_;
  PositionController position_;
  AttitudeController attitude_;
};

}  // namespace tiltquad
