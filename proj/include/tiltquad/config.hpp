// Flat key = value run configuration.
//
// One `key = value` pair per line; '#' starts a comment; unknown keys are
// rejected so typos surface immediately.  Every key has a default (see
// README for the full table with units), so an empty file is a valid
// configuration.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "tiltquad/control.hpp"
#include "tiltquad/mission.hpp"
#include "tiltquad/types.hpp"
#include "tiltquad/vehicle.hpp"

namespace tiltquad {

struct SimConfig {
  VehicleParams vehicle;
  ControllerGains gains;
  ControlMode mode = ControlMode::Omnidirectional;
  ServoModel servo_model = ServoModel::Instantaneous;
  double physics_dt = 0.001;   // s
  double control_dt = 0.004;   // s
  double duration = 60.0;      // s
  Disturbance disturbance;
  std::uint64_t seed = 0;      // used by randomized verify checks only
  double takeoff_duration = 5.0;                   // s
  double takeoff_altitude = std::nan("");          // m; NaN = first waypoint z
  Vec3 initial_position = Vec3::Zero();            // m
  double initial_yaw = 0.0;                        // rad
  bool mission_loop = false;

  int substeps_per_control() const {
    return static_cast<int>(std::llround(control_dt / physics_dt));
  }

  void validate() const {
    vehicle.validate();
    gains.validate();
    if (!(physics_dt > 0.0) || physics_dt > 0.01) {
      throw ConfigError("physics_dt must be in (0, 0.01] s");
    }
    if (!(control_dt > 0.0)) {
      throw ConfigError("control_dt must be > 0");
    }
    const double ratio = control_dt / physics_dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 || std::llround(ratio) < 1) {
      throw ConfigError("control_dt must be an integer multiple of physics_dt");
    }
    if (!(duration > 0.0)) {
      throw ConfigError("duration must be > 0");
    }
    if (takeoff_duration < 0.0) {
      throw ConfigError("takeoff_duration must be >= 0");
    }
  }
};

namespace detail {

inline bool parse_bool(std::string_view v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("expected boolean (true/false)", line);
}

}  // namespace detail

inline SimConfig parse_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = detail::trim(view);
    if (view.empty()) {
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    const std::string key(detail::trim(view.substr(0, eq)));
    const std::string_view value = detail::trim(view.substr(eq + 1));
    auto num = [&] { return detail::parse_double(value, line_no, 2); };

    if (key == "mass") cfg.vehicle.mass = num();
    else if (key == "inertia_xx") cfg.vehicle.inertia(0, 0) = num();
    else if (key == "inertia_yy") cfg.vehicle.inertia(1, 1) = num();
    else if (key == "inertia_zz") cfg.vehicle.inertia(2, 2) = num();
    else if (key == "arm_length") cfg.vehicle.arm_length = num();
    else if (key == "thrust_coeff") cfg.vehicle.thrust_coeff = num();
    else if (key == "torque_ratio") cfg.vehicle.torque_ratio = num();
    else if (key == "drag_translational")
      cfg.vehicle.drag_translational = num() * Mat3::Identity();
    else if (key == "drag_rotational")
      cfg.vehicle.drag_rotational = num() * Mat3::Identity();
    else if (key == "beta_max_deg") cfg.vehicle.beta_max = deg2rad(num());
    else if (key == "thrust_max") cfg.vehicle.thrust_max = num();
    else if (key == "rotor_speed_max") cfg.vehicle.rotor_speed_max = num();
    else if (key == "servo_rate_max") cfg.vehicle.servo_rate_max = num();
    else if (key == "servo_trim_deg") cfg.vehicle.servo_trim = deg2rad(num());
    else if (key == "body_frame_drag")
      cfg.vehicle.body_frame_drag = detail::parse_bool(value, line_no);
    else if (key == "pos_p") cfg.gains.position_p = Vec3::Constant(num());
    else if (key == "vel_p") cfg.gains.velocity.p = Vec3::Constant(num());
    else if (key == "vel_i") cfg.gains.velocity.i = Vec3::Constant(num());
    else if (key == "vel_d") cfg.gains.velocity.d = Vec3::Constant(num());
    else if (key == "att_p") cfg.gains.attitude_p = Vec3::Constant(num());
    else if (key == "rate_p") cfg.gains.rate.p = Vec3::Constant(num());
    else if (key == "rate_i") cfg.gains.rate.i = Vec3::Constant(num());
    else if (key == "rate_d") cfg.gains.rate.d = Vec3::Constant(num());
    else if (key == "rate_scale") cfg.gains.rate_scale = num();
    else if (key == "vel_int_limit") cfg.gains.velocity_integral_limit = num();
    else if (key == "rate_int_limit") cfg.gains.rate_integral_limit = num();
    else if (key == "torque_limit_xy") {
      const double v = num();
      cfg.gains.torque_limit.x() = v;
      cfg.gains.torque_limit.y() = v;
    } else if (key == "torque_limit_z") cfg.gains.torque_limit.z() = num();
    else if (key == "mode") {
      if (value == "omni") cfg.mode = ControlMode::Omnidirectional;
      else if (value == "conventional") cfg.mode = ControlMode::Conventional;
      else throw ParseError("mode must be 'omni' or 'conventional'", line_no);
    } else if (key == "servo_model") {
      if (value == "instantaneous") cfg.servo_model = ServoModel::Instantaneous;
      else if (value == "rate_limited") cfg.servo_model = ServoModel::RateLimited;
      else throw ParseError("servo_model must be 'instantaneous' or 'rate_limited'", line_no);
    } else if (key == "physics_dt") cfg.physics_dt = num();
    else if (key == "control_dt") cfg.control_dt = num();
    else if (key == "duration") cfg.duration = num();
    else if (key == "disturbance_force_x") cfg.disturbance.force_world.x() = num();
    else if (key == "disturbance_force_y") cfg.disturbance.force_world.y() = num();
    else if (key == "disturbance_force_z") cfg.disturbance.force_world.z() = num();
    else if (key == "disturbance_torque_x") cfg.disturbance.torque_body.x() = num();
    else if (key == "disturbance_torque_y") cfg.disturbance.torque_body.y() = num();
    else if (key == "disturbance_torque_z") cfg.disturbance.torque_body.z() = num();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
    else if (key == "takeoff_duration") cfg.takeoff_duration = num();
    else if (key == "takeoff_altitude") cfg.takeoff_altitude = num();
    else if (key == "initial_x") cfg.initial_position.x() = num();
    else if (key == "initial_y") cfg.initial_position.y() = num();
    else if (key == "initial_z") cfg.initial_position.z() = num();
    else if (key == "initial_yaw") cfg.initial_yaw = num();
    else if (key == "loop") cfg.mission_loop = detail::parse_bool(value, line_no);
    else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  return cfg;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in);
}

}  // namespace tiltquad
