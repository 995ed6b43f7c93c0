// Deterministic closed-loop run: mission -> controller -> allocation ->
// servo model -> rigid-body integration, with telemetry at every control
// step.
//
// Per control step the loop reads the state, schedules the mission
// setpoint, runs the position and attitude loops, composes the wrench,
// allocates and extracts actuator commands, applies the servo model, logs
// one record, then holds the commands over the physics substeps.  No
// randomness is involved; identical inputs give bit-identical telemetry.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "tiltquad/allocation.hpp"
#include "tiltquad/config.hpp"
#include "tiltquad/control.hpp"
#include "tiltquad/mission.hpp"
#include "tiltquad/telemetry.hpp"
#include "tiltquad/types.hpp"
#include "tiltquad/vehicle.hpp"

namespace tiltquad {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_level_from_env() {
  const char* env = std::getenv("SIM_LOG_LEVEL");
  if (env == nullptr) {
    return LogLevel::Warn;
  }
  const std::string v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "warn") return LogLevel::Warn;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

inline void log_line(LogLevel level, const std::string& msg) {
  static const LogLevel threshold = log_level_from_env();
  if (level <= threshold) {
    static constexpr const char* names[] = {"ERROR", "WARN", "INFO", "DEBUG"};
    std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
  }
}

struct RunResult {
  std::vector<TelemetryRecord> telemetry;
  RunMetrics metrics;
  bool aborted = false;
  std::string error;
};

// Executes one mission.  When sink is non-null the telemetry is streamed to
// it row by row, so an aborted run still leaves the rows produced so far.
inline RunResult run(const SimConfig& config, const Mission& mission,
                     std::ostream* sink = nullptr) {
  config.validate();
  if (mission.waypoints.empty()) {
    throw ConfigError("run: mission has no waypoints");
  }

  const VehicleParams& vehicle = config.vehicle;
  const bool omni = config.mode == ControlMode::Omnidirectional;
  const EffectivenessMatrix effectiveness =
      build_effectiveness(vehicle, /*tilt_enabled=*/omni);

  Mission active = mission;
  active.loop = config.mission_loop;
  if (!std::isnan(config.takeoff_altitude)) {
    active.takeoff_altitude = config.takeoff_altitude;
  }

  VehicleState state;
  state.position = config.initial_position;
  state.attitude.yaw = config.initial_yaw;

  CascadedController controller(config.mode, config.gains, vehicle);
  MissionScheduler scheduler(active);
  std::array<double, 4> tilt_actual = {0, 0, 0, 0};

  RunResult result;
  if (sink != nullptr) {
    write_telemetry_header(*sink);
  }

  const int substeps = config.substeps_per_control();
  const long total_steps = static_cast<long>(config.duration / config.control_dt);
  const size_t n_waypoints = active.waypoints.size();

  log_line(LogLevel::Info,
           std::string("run: mode=") + (omni ? "omni" : "conventional") +
               ", duration=" + std::to_string(config.duration) + " s, " +
               std::to_string(n_waypoints) + " waypoints");

  bool saturation_logged = false;
  int last_wp_column = 0;

  for (long k = 0; k <= total_steps; ++k) {
    const double t = static_cast<double>(k) * config.control_dt;

    Setpoint sp;
    int wp_column = 0;
    if (t < config.takeoff_duration) {
      const double frac = config.takeoff_duration > 0.0
                              ? t / config.takeoff_duration
                              : 1.0;
      sp.position = config.initial_position;
      sp.position.z() = config.initial_position.z() +
                        (active.takeoff_altitude - config.initial_position.z()) * frac;
      sp.yaw = 0.0;
    } else {
      sp = scheduler.advance(state, config.control_dt);
      const MissionScheduler::Progress progress = scheduler.progress();
      wp_column = progress.complete ? static_cast<int>(n_waypoints) + 1
                                    : static_cast<int>(progress.waypoint_index) + 1;
    }
    if (wp_column != last_wp_column) {
      log_line(LogLevel::Info, "run: t=" + std::to_string(t) +
                                   " waypoint column -> " + std::to_string(wp_column));
      last_wp_column = wp_column;
    }

    TelemetryRecord rec;
    rec.t = t;
    rec.position = state.position;
    rec.attitude = state.attitude;
    rec.velocity = state.velocity;
    rec.body_rate = state.body_rate;
    rec.setpoint = sp.position;
    rec.waypoint = wp_column;

    try {
      const ControlOutput ctrl = controller.update(sp, state, config.control_dt);
      const ActuatorForces forces = allocate(ctrl.wrench, effectiveness);
      const ExtractionResult extraction = extract_commands(forces, vehicle);

      tilt_actual = servo_filter(extraction.commands.tilt, tilt_actual,
                                 config.control_dt, vehicle, config.servo_model);
      ActuatorCommands cmds = extraction.commands;
      cmds.tilt = tilt_actual;

      const NormalizedOutputs outputs = normalize(
          ExtractionResult{cmds, extraction.thrust_saturated,
                           extraction.tilt_saturated},
          vehicle);
      rec.rotor_speed = cmds.rotor_speed;
      rec.tilt = cmds.tilt;
      rec.motor = outputs.motor;
      rec.servo = outputs.servo;
      rec.motor_saturated = outputs.motor_saturated;
      rec.servo_saturated = outputs.servo_saturated;

      if (!saturation_logged && extraction.any_saturated()) {
        log_line(LogLevel::Warn,
                 "run: actuator saturation first hit at t=" + std::to_string(t));
        saturation_logged = true;
      }

      result.telemetry.push_back(rec);
      if (sink != nullptr) {
        write_telemetry_record(*sink, rec);
      }

      if (k < total_steps) {
        for (int s = 0; s < substeps; ++s) {
          state = step(state, cmds, config.disturbance, vehicle,
                       config.physics_dt, t + s * config.physics_dt);
        }
      }
    } catch (const IntegrationDivergedError& e) {
      result.aborted = true;
      result.error = std::string(e.what()) + " at t=" + std::to_string(e.time_s);
      break;
    } catch (const SingularAttitudeError& e) {
      result.aborted = true;
      result.error = std::string(e.what()) + " at t=" + std::to_string(t);
      break;
    }
  }

  if (sink != nullptr) {
    sink->flush();
  }
  if (result.aborted) {
    log_line(LogLevel::Error, "run: aborted: " + result.error);
  }
  if (!result.telemetry.empty()) {
    result.metrics = compute_metrics(result.telemetry, config, n_waypoints);
  }
  return result;
}

}  // namespace tiltquad
