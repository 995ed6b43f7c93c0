// Acceptance suite: end-to-end checks of the allocation chain, the
// closed-loop missions, and the verification oracles.  Prints one PASS/FAIL
// line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tiltquad/tiltquad.hpp"

using namespace tiltquad;

namespace {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CriterionResult> g_results;

void report(int number, const std::string& name, bool passed,
            const std::string& detail) {
  g_results.push_back({number, name, passed, detail});
  std::printf("%s %2d %-28s %s\n", passed ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

struct NamedRun {
  std::string name;
  bool conventional = false;
  RunResult result;
};

std::vector<NamedRun> g_runs;  // inspected again by the limits criterion

// 1. u = B^+ v solves B u = v across the working envelope, quickly.
void criterion_allocation_exactness() {
  const auto start = std::chrono::steady_clock::now();
  VehicleParams p;
  const EffectivenessMatrix eff = build_effectiveness(p);
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Wrench v = sample_wrench(rng);
    const ActuatorForces u = allocate(v, eff);
    worst = std::max(worst,
                     (eff.matrix() * u.u - v.to_vector()).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);
  const bool ok = worst <= 1e-9 && elapsed < 1.0;
  report(1, "allocation-exactness",
         ok, fmt("max |Bu-v| = %.2e (tol 1e-9), %.3f s (limit 1 s)", worst, elapsed));
}

// 2. Minimal-norm agreement with the independent oracle; zero longitudinal
// components.
void criterion_minimal_norm() {
  VehicleParams p;
  const EffectivenessMatrix eff = build_effectiveness(p);
  std::mt19937_64 rng(1001);
  double worst_diff = 0.0;
  double worst_lon = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Wrench v = sample_wrench(rng);
    const ActuatorForces u = allocate(v, eff);
    const ActuatorForces oracle = oracle_least_squares(eff.matrix(), v);
    worst_diff = std::max(worst_diff, (u.u - oracle.u).cwiseAbs().maxCoeff());
    for (int r = 1; r <= 4; ++r) {
      worst_lon = std::max(worst_lon, std::abs(u.longitudinal(r)));
    }
  }
  const bool ok = worst_diff <= 1e-8 && worst_lon <= 1e-12;
  report(2, "minimal-norm-and-zero-lon", ok,
         fmt("oracle diff %.2e (tol 1e-8), |f_lon| %.2e (tol 1e-12)", worst_diff,
             worst_lon));
}

// 3. Wrench round trip through extraction and the physics model, and the
// mutation that must break it.
void criterion_roundtrip() {
  VehicleParams p;
  const CheckReport clean = wrench_roundtrip_check(p, 1000, 1003);
  const CheckReport mutated =
      wrench_roundtrip_check(p, 1000, 1003, ModelMutation::FlipLateralYawSign);
  const bool ok = clean.passed && !mutated.passed;
  report(3, "wrench-roundtrip", ok,
         fmt("residual %.2e (tol 1e-6); mutated residual %.2e breaks it: %s",
             clean.measured_error, mutated.measured_error,
             !mutated.passed ? "yes" : "no"));
}

// 4. Closed-loop hover for 30 s.
void criterion_hover() {
  const auto start = std::chrono::steady_clock::now();
  SimConfig cfg;
  cfg.duration = 30.0;
  cfg.initial_position = Vec3(0, 0, 1.5);
  Mission mission;
  mission.waypoints.push_back({Vec3(0, 0, 1.5), 5.0, 0.25});
  mission.takeoff_altitude = 1.5;

  const RunResult result = run(cfg, mission);
  const double elapsed = seconds_since(start);

  double thrust_sum = 0.0;
  size_t thrust_samples = 0;
  for (const TelemetryRecord& r : result.telemetry) {
    if (r.t >= 20.0) {
      for (int i = 0; i < 4; ++i) {
        thrust_sum += cfg.vehicle.thrust_coeff * r.rotor_speed[i] * r.rotor_speed[i];
        ++thrust_samples;
      }
    }
  }
  const double mean_thrust = thrust_sum / static_cast<double>(thrust_samples);
  const double expected = 5.0153625;  // mg/4 for the 2.045 kg vehicle

  const bool ok = !result.aborted &&
                  result.metrics.rms_position_error <= 0.01 &&
                  std::abs(mean_thrust - expected) <= 0.01 * expected &&
                  elapsed < 5.0;
  report(4, "hover", ok,
         fmt("rms %.2e m (tol 1e-2), rotor thrust %.4f N (want %.4f +-1%%), %.2f s "
             "(limit 5 s)",
             result.metrics.rms_position_error, mean_thrust, expected, elapsed));
  g_runs.push_back({"hover", false, result});
}

// 5. Square mission: level attitude with tilt enabled, visible tilting
// without it, both completing.
void criterion_square_mission() {
  const auto start = std::chrono::steady_clock::now();
  const Mission mission =
      load_mission(std::string(TILTQUAD_DATA_DIR) + "/square_mission.csv");

  SimConfig omni;
  omni.duration = 60.0;
  const RunResult omni_run = run(omni, mission);

  SimConfig conventional;
  conventional.duration = 60.0;
  conventional.mode = ControlMode::Conventional;
  const RunResult conv_run = run(conventional, mission);
  const double elapsed = seconds_since(start);

  const double omni_tilt =
      std::max(omni_run.metrics.max_roll, omni_run.metrics.max_pitch);
  const double conv_tilt =
      std::max(conv_run.metrics.max_roll, conv_run.metrics.max_pitch);

  const bool ok = !omni_run.aborted && !conv_run.aborted &&
                  omni_tilt <= deg2rad(2.0) && conv_tilt >= deg2rad(5.0) &&
                  omni_run.metrics.mission_complete &&
                  conv_run.metrics.mission_complete && elapsed < 30.0;
  report(5, "square-mission-decoupling", ok,
         fmt("omni tilt %.3f deg (tol 2), conventional tilt %.2f deg (floor 5), "
             "complete %s/%s, %.1f s (limit 30 s)",
             rad2deg(omni_tilt), rad2deg(conv_tilt),
             omni_run.metrics.mission_complete ? "yes" : "no",
             conv_run.metrics.mission_complete ? "yes" : "no", elapsed));
  g_runs.push_back({"square-omni", false, omni_run});
  g_runs.push_back({"square-conventional", true, conv_run});
}

// 6. Actuator limits over every acceptance run so far (plus the
// rate-limited run added by criterion 10 before this one executes).
void criterion_actuator_limits() {
  bool ok = true;
  std::string offender;
  const VehicleParams defaults;
  const double beta_limit = deg2rad(40.0) + 1e-12;
  for (const NamedRun& nr : g_runs) {
    for (const TelemetryRecord& r : nr.result.telemetry) {
      for (int i = 0; i < 4; ++i) {
        const double thrust =
            defaults.thrust_coeff * r.rotor_speed[i] * r.rotor_speed[i];
        if (std::abs(r.tilt[i]) > beta_limit || r.motor[i] < 0.0 ||
            r.motor[i] > 1.0 || thrust > defaults.thrust_max + 1e-9 ||
            (nr.conventional && r.tilt[i] != 0.0)) {
          ok = false;
          offender = nr.name + " at t=" + std::to_string(r.t);
        }
      }
    }
  }
  report(6, "actuator-limits", ok,
         ok ? fmt("all %zu runs: |beta| <= 40 deg, motor in [0,1], T <= 13 N, "
                  "conventional beta == 0",
                  g_runs.size())
            : "violated in " + offender);
}

// 7. Dynamics fidelity: conservation oracle and the RK4 order check.
void criterion_dynamics_fidelity() {
  VehicleParams p;
  const CheckReport conservation = conservation_check(p);

  VehicleParams drag_free = p;
  drag_free.drag_translational.setZero();
  drag_free.drag_rotational.setZero();
  auto integrate = [&](double dt) {
    VehicleState s;
    s.body_rate = Vec3(1.0, 2.0, 3.0);
    const long n = std::lround(1.0 / dt);
    for (long i = 0; i < n; ++i) {
      s = step(s, ActuatorCommands{}, Disturbance{}, drag_free, dt, i * dt);
    }
    return s;
  };
  auto distance = [](const VehicleState& a, const VehicleState& b) {
    return (a.position - b.position).norm() + (a.velocity - b.velocity).norm() +
           (a.body_rate - b.body_rate).norm() +
           std::abs(a.attitude.roll - b.attitude.roll) +
           std::abs(a.attitude.pitch - b.attitude.pitch) +
           std::abs(a.attitude.yaw - b.attitude.yaw);
  };
  const VehicleState ref = integrate(1.0 / 16384.0);
  const double e_coarse = distance(integrate(1.0 / 256.0), ref);
  const double e_fine = distance(integrate(1.0 / 512.0), ref);
  const double ratio = e_coarse / e_fine;

  const bool ok = conservation.passed && ratio >= 12.0 && ratio <= 20.0;
  report(7, "dynamics-fidelity", ok,
         fmt("conservation error %.2e (tol 1e-6), RK4 ratio %.1f (want [12,20])",
             conservation.measured_error, ratio));
}

// 8. Lateral-acceleration envelope: dual-method agreement, value emitted.
void criterion_envelope() {
  VehicleParams p;
  const CheckReport r = envelope_crosscheck(p);
  const double envelope = feasible_lateral_accel(p).accel;
  report(8, "lateral-envelope", r.passed,
         fmt("computed envelope %.3f m/s^2; methods agree to %.2e (tol 1e-2)",
             envelope, r.measured_error));
}

// 9. Byte-identical telemetry files from identical runs.
void criterion_determinism() {
  SimConfig cfg;
  cfg.duration = 12.0;
  const Mission mission =
      load_mission(std::string(TILTQUAD_DATA_DIR) + "/square_mission.csv");

  const auto dir = std::filesystem::temp_directory_path();
  const auto path_a = dir / "tiltquad_accept_a.csv";
  const auto path_b = dir / "tiltquad_accept_b.csv";
  {
    std::ofstream a(path_a);
    run(cfg, mission, &a);
  }
  {
    std::ofstream b(path_b);
    run(cfg, mission, &b);
  }
  std::ifstream a(path_a, std::ios::binary);
  std::ifstream b(path_b, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  const bool ok = !sa.str().empty() && sa.str() == sb.str();
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
  report(9, "determinism", ok,
         fmt("%zu bytes, files %s", sa.str().size(),
             ok ? "byte-identical" : "DIFFER"));
}

// 10. Rate-limited servo: slew timing and the level-attitude criterion
// under the slew.
void criterion_servo_rate_limit() {
  VehicleParams p;
  const double control_dt = 0.004;
  const std::array<double, 4> target = {deg2rad(40.0), 0, 0, 0};
  std::array<double, 4> beta = {0, 0, 0, 0};
  int steps = 0;
  while (std::abs(beta[0] - target[0]) > 1e-12 && steps < 1000) {
    beta = servo_filter(target, beta, control_dt, p, ServoModel::RateLimited);
    ++steps;
  }
  const double reach_time = steps * control_dt;
  const double nominal = deg2rad(40.0) / p.servo_rate_max;  // 33.34 ms
  const bool timing_ok = std::abs(reach_time - nominal) <= control_dt + 1e-12;

  const Mission mission =
      load_mission(std::string(TILTQUAD_DATA_DIR) + "/square_mission.csv");
  SimConfig cfg;
  cfg.duration = 60.0;
  cfg.servo_model = ServoModel::RateLimited;
  const RunResult result = run(cfg, mission);
  const double tilt = std::max(result.metrics.max_roll, result.metrics.max_pitch);
  const bool mission_ok = !result.aborted && tilt <= deg2rad(2.0) &&
                          result.metrics.mission_complete;

  report(10, "servo-rate-limit", timing_ok && mission_ok,
         fmt("0->40 deg in %.1f ms (nominal %.1f +- %.1f); omni tilt %.3f deg, "
             "complete %s",
             1e3 * reach_time, 1e3 * nominal, 1e3 * control_dt, rad2deg(tilt),
             result.metrics.mission_complete ? "yes" : "no"));
  g_runs.push_back({"square-omni-servo-limited", false, result});
}

}  // namespace

int main() {
  criterion_allocation_exactness();
  criterion_minimal_norm();
  criterion_roundtrip();
  criterion_hover();
  criterion_square_mission();
  criterion_servo_rate_limit();   // runs before the limits sweep (criterion 6)
  criterion_actuator_limits();
  criterion_dynamics_fidelity();
  criterion_envelope();
  criterion_determinism();

  int failures = 0;
  for (const CriterionResult& r : g_results) {
    if (!r.passed) {
      ++failures;
    }
  }
  std::printf("%d/%zu acceptance criteria passed\n", int(g_results.size()) - failures,
              g_results.size());
  return failures == 0 ? 0 : 1;
}
