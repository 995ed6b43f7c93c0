// Command-line front end: closed-loop mission runs, one-shot allocation
// inspection, and the verification suite.
//
// Exit codes: 0 success, 1 run or check failure, 2 usage/configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiltquad/tiltquad.hpp"

namespace {

using namespace tiltquad;

SimConfig load_config_or_default(const std::string& path) {
  if (path.empty()) {
    return SimConfig{};
  }
  return load_config(path);
}

Wrench parse_wrench_arg(const std::string& arg) {
  std::vector<double> values;
  size_t start = 0;
  int line = 1;
  while (true) {
    const size_t pos = arg.find(',', start);
    const std::string token =
        pos == std::string::npos ? arg.substr(start) : arg.substr(start, pos - start);
    values.push_back(detail::parse_double(token, line, static_cast<int>(values.size()) + 1));
    if (pos == std::string::npos) {
      break;
    }
    start = pos + 1;
  }
  if (values.size() != 6) {
    throw ConfigError("--wrench expects 6 comma-separated values (tx,ty,tz,fx,fy,fz)");
  }
  Wrench v;
  v.torque = Vec3(values[0], values[1], values[2]);
  v.force = Vec3(values[3], values[4], values[5]);
  return v;
}

int cmd_run(const std::string& config_path, const std::string& mission_path,
            const std::string& mode, const std::string& out_path,
            std::optional<double> duration, std::optional<std::uint64_t> seed,
            bool servo_rate_limit) {
  SimConfig config = load_config_or_default(config_path);
  if (mode == "omni") {
    config.mode = ControlMode::Omnidirectional;
  } else if (mode == "conventional") {
    config.mode = ControlMode::Conventional;
  } else if (!mode.empty()) {
    throw ConfigError("--mode must be 'omni' or 'conventional'");
  }
  if (duration) {
    config.duration = *duration;
  }
  if (seed) {
    config.seed = *seed;
  }
  if (servo_rate_limit) {
    config.servo_model = ServoModel::RateLimited;
  }
  const Mission mission = load_mission(mission_path);

  std::ofstream out;
  std::ostream* sink = nullptr;
  if (!out_path.empty()) {
    out.open(out_path);
    if (!out) {
      throw ConfigError("cannot open output file '" + out_path + "'");
    }
    sink = &out;
  }

  const RunResult result = run(config, mission, sink);
  if (result.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", result.error.c_str());
    return 1;
  }

  const RunMetrics& m = result.metrics;
  std::printf("records              %zu\n", result.telemetry.size());
  std::printf("rms_position_error   %.5e m\n", m.rms_position_error);
  std::printf("max_roll             %.5e rad (%.3f deg)\n", m.max_roll,
              rad2deg(m.max_roll));
  std::printf("max_pitch            %.5e rad (%.3f deg)\n", m.max_pitch,
              rad2deg(m.max_pitch));
  std::printf("yaw_excursion        %.5e rad (%.3f deg)\n", m.yaw_excursion,
              rad2deg(m.yaw_excursion));
  std::printf("mean_motor           %.5e\n", m.mean_motor);
  std::printf("max_motor            %.5e\n", m.max_motor);
  if (m.mission_complete) {
    std::printf("mission_complete     yes (t = %.3f s)\n", m.completion_time);
  } else {
    std::printf("mission_complete     no\n");
  }
  return 0;
}

int cmd_allocate(const std::string& config_path, const std::string& wrench_arg) {
  const SimConfig config = load_config_or_default(config_path);
  config.vehicle.validate();
  const Wrench v = parse_wrench_arg(wrench_arg);

  const EffectivenessMatrix eff = build_effectiveness(config.vehicle);
  const ActuatorForces u = allocate(v, eff);
  const ExtractionResult ex = extract_commands(u, config.vehicle);
  const NormalizedOutputs outputs = normalize(ex, config.vehicle);

  std::printf("wrench v = (%.5e, %.5e, %.5e, %.5e, %.5e, %.5e)\n", v.torque.x(),
              v.torque.y(), v.torque.z(), v.force.x(), v.force.y(), v.force.z());
  std::printf("%-7s %12s %12s %12s %12s %12s %12s %12s %5s\n", "rotor", "f_lon",
              "f_lat", "f_ver", "thrust_N", "omega_rad_s", "beta_rad", "motor",
              "servo");
  for (int i = 1; i <= kNumRotors; ++i) {
    const double thrust = config.vehicle.thrust_coeff *
                          ex.commands.rotor_speed[i - 1] *
                          ex.commands.rotor_speed[i - 1];
    std::printf("%-7d %12.5e %12.5e %12.5e %12.5e %12.5e %12.5e %12.5e %5.2f\n",
                i, u.longitudinal(i), u.lateral(i), u.vertical(i), thrust,
                ex.commands.rotor_speed[i - 1], ex.commands.tilt[i - 1],
                outputs.motor[i - 1], outputs.servo[i - 1]);
  }
  bool any = false;
  for (int i = 0; i < kNumRotors; ++i) {
    if (outputs.motor_saturated[i] || outputs.servo_saturated[i]) {
      std::printf("saturated: rotor %d%s%s\n", i + 1,
                  outputs.motor_saturated[i] ? " motor" : "",
                  outputs.servo_saturated[i] ? " servo" : "");
      any = true;
    }
  }
  if (!any) {
    std::printf("saturated: none\n");
  }
  return 0;
}

int cmd_verify(const std::string& config_path, int samples, std::uint64_t seed) {
  const SimConfig config = load_config_or_default(config_path);
  config.vehicle.validate();
  const std::vector<CheckReport> reports =
      run_all_checks(config.vehicle, samples, seed);
  bool all_passed = true;
  for (const CheckReport& r : reports) {
    std::printf("%s\n", to_line(r).c_str());
    all_passed = all_passed && r.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tilt-rotor quadrotor flight simulator and control allocator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mission_path;
  std::string mode;
  std::string out_path;
  std::string wrench_arg;
  double duration = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool duration_set = false;
  bool servo_rate_limit = false;
  int samples = 1000;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a closed-loop mission");
  run_cmd->add_option("--config", config_path, "Configuration file (key = value)");
  run_cmd->add_option("--mission", mission_path, "Mission waypoint CSV")->required();
  run_cmd->add_option("--mode", mode, "Control mode: omni or conventional");
  run_cmd->add_option("--out", out_path, "Telemetry CSV output path");
  run_cmd->add_option("--duration", duration, "Simulated duration in seconds")
      ->each([&](const std::string&) { duration_set = true; });
  run_cmd->add_option("--seed", seed, "Seed recorded in the configuration")
      ->each([&](const std::string&) { seed_set = true; });
  run_cmd->add_flag("--servo-rate-limit", servo_rate_limit,
                    "Enable the rate-limited servo model");

  CLI::App* alloc_cmd =
      app.add_subcommand("allocate", "Allocate a single wrench and print the result");
  alloc_cmd->add_option("--config", config_path, "Configuration file");
  alloc_cmd->add_option("--wrench", wrench_arg, "tx,ty,tz,fx,fy,fz")->required();

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the verification checks");
  verify_cmd->add_option("--config", config_path, "Configuration file");
  verify_cmd->add_option("--samples", samples, "Random samples per batch check");
  verify_cmd->add_option("--seed", seed, "Seed for the randomized checks")
      ->each([&](const std::string&) { seed_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      return cmd_run(config_path, mission_path, mode, out_path,
                     duration_set ? std::optional<double>(duration) : std::nullopt,
                     seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     servo_rate_limit);
    }
    if (alloc_cmd->parsed()) {
      return cmd_allocate(config_path, wrench_arg);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(config_path, samples, seed_set ? seed : 42);
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s (line %d)\n", e.what(), e.line);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
