// Telemetry records, the CSV column contract, and run metrics.
//
// The CSV layout is stable: one header row, then one row per control step.
// Real values are printed as %.5e (six significant digits), flags as 0/1,
// the waypoint column as an integer: 0 during takeoff, the 1-based index of
// the waypoint being sought afterwards, and waypoint_count+1 once the
// mission has completed.  Identical runs produce byte-identical files.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tiltquad/config.hpp"
#include "tiltquad/geometry.hpp"
#include "tiltquad/types.hpp"

namespace tiltquad {

struct TelemetryRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  EulerAngles attitude;
  Vec3 velocity = Vec3::Zero();
  Vec3 body_rate = Vec3::Zero();
  Vec3 setpoint = Vec3::Zero();
  std::array<double, 4> rotor_speed = {0, 0, 0, 0};
  std::array<double, 4> tilt = {0, 0, 0, 0};
  std::array<double, 4> motor = {0, 0, 0, 0};
  std::array<double, 4> servo = {0, 0, 0, 0};
  std::array<bool, 4> motor_saturated = {false, false, false, false};
  std::array<bool, 4> servo_saturated = {false, false, false, false};
  int waypoint = 0;
};

inline constexpr const char* kTelemetryHeader =
    "t,x,y,z,roll,pitch,yaw,vx,vy,vz,p,q,r,sp_x,sp_y,sp_z,"
    "rotor1,rotor2,rotor3,rotor4,tilt1,tilt2,tilt3,tilt4,"
    "motor1,motor2,motor3,motor4,servo1,servo2,servo3,servo4,"
    "sat_motor1,sat_motor2,sat_motor3,sat_motor4,"
    "sat_servo1,sat_servo2,sat_servo3,sat_servo4,wp";

inline void write_telemetry_header(std::ostream& out) {
  out << kTelemetryHeader << '\n';
}

inline void write_telemetry_record(std::ostream& out, const TelemetryRecord& r) {
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.5e%c", v, sep);
    out << buf;
  };
  put(r.t, ',');
  put(r.position.x(), ',');
  put(r.position.y(), ',');
  put(r.position.z(), ',');
  put(r.attitude.roll, ',');
  put(r.attitude.pitch, ',');
  put(r.attitude.yaw, ',');
  put(r.velocity.x(), ',');
  put(r.velocity.y(), ',');
  put(r.velocity.z(), ',');
  put(r.body_rate.x(), ',');
  put(r.body_rate.y(), ',');
  put(r.body_rate.z(), ',');
  put(r.setpoint.x(), ',');
  put(r.setpoint.y(), ',');
  put(r.setpoint.z(), ',');
  for (double v : r.rotor_speed) put(v, ',');
  for (double v : r.tilt) put(v, ',');
  for (double v : r.motor) put(v, ',');
  for (double v : r.servo) put(v, ',');
  for (bool b : r.motor_saturated) out << (b ? 1 : 0) << ',';
  for (bool b : r.servo_saturated) out << (b ? 1 : 0) << ',';
  out << r.waypoint << '\n';
}

// Summary statistics of a run.  Attitude extrema, yaw excursion, and motor
// statistics are taken over the post-takeoff window; the position-error RMS
// spans the whole run.
struct RunMetrics {
  double rms_position_error = 0.0;  // m
  double max_roll = 0.0;            // rad
  double max_pitch = 0.0;           // rad
  double yaw_excursion = 0.0;       // rad
  double mean_motor = 0.0;
  double max_motor = 0.0;
  double completion_time = -1.0;    // s, -1 when the mission did not complete
  bool mission_complete = false;
};

inline RunMetrics compute_metrics(const std::vector<TelemetryRecord>& telemetry,
                                  const SimConfig& config,
                                  size_t waypoint_count) {
  if (telemetry.empty()) {
    throw std::invalid_argument("compute_metrics: empty telemetry");
  }
  RunMetrics m;
  double sq_err_sum = 0.0;
  double motor_sum = 0.0;
  size_t motor_samples = 0;
  const int complete_marker = static_cast<int>(waypoint_count) + 1;
  for (const TelemetryRecord& r : telemetry) {
    sq_err_sum += (r.position - r.setpoint).squaredNorm();
    if (r.t >= config.takeoff_duration) {
      m.max_roll = std::max(m.max_roll, std::abs(r.attitude.roll));
      m.max_pitch = std::max(m.max_pitch, std::abs(r.attitude.pitch));
      m.yaw_excursion = std::max(m.yaw_excursion, std::abs(wrap_pi(r.attitude.yaw)));
      for (double v : r.motor) {
        motor_sum += v;
        m.max_motor = std::max(m.max_motor, v);
        ++motor_samples;
      }
    }
    if (!m.mission_complete && r.waypoint == complete_marker) {
      m.mission_complete = true;
      m.completion_time = r.t;
    }
  }
  m.rms_position_error = std::sqrt(sq_err_sum / static_cast<double>(telemetry.size()));
  if (motor_samples > 0) {
    m.mean_motor = motor_sum / static_cast<double>(motor_samples);
  }
  return m;
}

}  // namespace tiltquad
