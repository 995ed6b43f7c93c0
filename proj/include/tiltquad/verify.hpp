// Independent cross-checks of the allocation and dynamics implementations.
//
// The least-squares oracle here deliberately avoids the SVD path used by
// pseudo_inverse: it orthonormalizes the rows of B by modified Gram-Schmidt,
// solves the resulting triangular system by substitution, and maps back into
// the row space.  Agreement between the two routes is what the checks assert.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "tiltquad/allocation.hpp"
#include "tiltquad/types.hpp"
#include "tiltquad/vehicle.hpp"

namespace tiltquad {

struct CheckReport {
  std::string name;
  bool passed = false;
  double measured_error = 0.0;
  double tolerance = 0.0;
  std::string witness;  // worst-case input or explanatory note on failure
};

inline std::string to_line(const CheckReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), " %s %.3e %.3e", r.passed ? "PASS" : "FAIL",
                r.measured_error, r.tolerance);
  std::string line = r.name + buf;
  if (!r.witness.empty()) {
    line += " # " + r.witness;
  }
  return line;
}

// Minimal-norm exact solution of B u = v by row-space construction:
// orthonormal row basis (modified Gram-Schmidt), forward substitution on the
// triangular coefficients, u = Q^T y.  Throws DegenerateMatrixError when the
// rows are dependent beyond tolerance.
inline ActuatorForces oracle_least_squares(const Mat6x12& b, const Wrench& v) {
  constexpr int kRows = 6;
  constexpr int kCols = 12;
  std::array<std::array<double, kCols>, kRows> q{};
  std::array<std::array<double, kRows>, kRows> coeff{};

  for (int j = 0; j < kRows; ++j) {
    std::array<double, kCols> w{};
    double row_norm = 0.0;
    for (int c = 0; c < kCols; ++c) {
      w[c] = b(j, c);
      row_norm += w[c] * w[c];
    }
    row_norm = std::sqrt(row_norm);
    for (int k = 0; k < j; ++k) {
      double dot = 0.0;
      for (int c = 0; c < kCols; ++c) {
        dot += w[c] * q[k][c];
      }
      coeff[j][k] = dot;
      for (int c = 0; c < kCols; ++c) {
        w[c] -= dot * q[k][c];
      }
    }
    double norm = 0.0;
    for (double x : w) {
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm <= 1e-12 * std::max(1.0, row_norm)) {
      throw DegenerateMatrixError(
          "oracle_least_squares: row " + std::to_string(j) +
          " is linearly dependent; matrix is rank deficient");
    }
    coeff[j][j] = norm;
    for (int c = 0; c < kCols; ++c) {
      q[j][c] = w[c] / norm;
    }
  }

  const Vec6 rhs = v.to_vector();
  std::array<double, kRows> y{};
  for (int j = 0; j < kRows; ++j) {
    double acc = rhs(j);
    for (int k = 0; k < j; ++k) {
      acc -= coeff[j][k] * y[k];
    }
    y[j] = acc / coeff[j][j];
  }

  ActuatorForces out;
  for (int c = 0; c < kCols; ++c) {
    double acc = 0.0;
    for (int j = 0; j < kRows; ++j) {
      acc += y[j] * q[j][c];
    }
    out.u(c) = acc;
  }
  return out;
}

// Random wrenches inside the working envelope used by the batch checks.
inline Wrench sample_wrench(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> torque_xy(-2.0, 2.0);
  std::uniform_real_distribution<double> torque_z(-0.5, 0.5);
  std::uniform_real_distribution<double> force_xy(-10.0, 10.0);
  std::uniform_real_distribution<double> force_z(0.0, 40.0);
  Wrench v;
  v.torque = Vec3(torque_xy(rng), torque_xy(rng), torque_z(rng));
  v.force = Vec3(force_xy(rng), force_xy(rng), force_z(rng));
  return v;
}

enum class ModelMutation { None, FlipLateralYawSign };

// Allocation/extraction/physics consistency: reconstructing the wrench from
// the extracted commands must reproduce the allocated wrench.  Saturated
// samples are skipped.  A mutation hook flips the sign of the yaw moment the
// lateral forces produce, which must break the check.
inline CheckReport wrench_roundtrip_check(const VehicleParams& params,
                                          int n_samples, std::uint64_t seed,
                                          ModelMutation mutation = ModelMutation::None) {
  CheckReport report;
  report.name = "wrench_roundtrip";
  report.tolerance = 1e-6;

  const EffectivenessMatrix eff = build_effectiveness(params);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  Wrench worst_v;
  int used = 0;
  for (int i = 0; i < n_samples; ++i) {
    const Wrench v = sample_wrench(rng);
    const ActuatorForces u = allocate(v, eff);
    const ExtractionResult ex = extract_commands(u, params);
    if (ex.any_saturated()) {
      continue;
    }
    ++used;
    Wrench back = propulsive_wrench(ex.commands, params);
    if (mutation == ModelMutation::FlipLateralYawSign) {
      double lateral_sum = 0.0;
      for (int r = 0; r < kNumRotors; ++r) {
        const double thrust =
            params.thrust_coeff * ex.commands.rotor_speed[r] * ex.commands.rotor_speed[r];
        lateral_sum += thrust * std::sin(ex.commands.tilt[r]);
      }
      back.torque.z() += 2.0 * params.arm_length * lateral_sum;
    }
    const double err = (back.to_vector() - v.to_vector()).cwiseAbs().maxCoeff();
    if (err > worst) {
      worst = err;
      worst_v = v;
    }
  }
  report.measured_error = worst;
  report.passed = used > 0 && worst <= report.tolerance;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d/%d unsaturated; worst v = (%.3g, %.3g, %.3g, %.3g, %.3g, %.3g)",
                used, n_samples, worst_v.torque.x(), worst_v.torque.y(),
                worst_v.torque.z(), worst_v.force.x(), worst_v.force.y(),
                worst_v.force.z());
  report.witness = buf;
  return report;
}

// Dual-route agreement between allocate() and the Gram-Schmidt oracle.
inline CheckReport least_squares_agreement_check(const VehicleParams& params,
                                                 int n_samples,
                                                 std::uint64_t seed) {
  CheckReport report;
  report.name = "least_squares_agreement";
  report.tolerance = 1e-8;

  const EffectivenessMatrix eff = build_effectiveness(params);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const Wrench v = sample_wrench(rng);
    const ActuatorForces main = allocate(v, eff);
    const ActuatorForces oracle = oracle_least_squares(eff.matrix(), v);
    worst = std::max(worst, (main.u - oracle.u).cwiseAbs().maxCoeff());
  }
  report.measured_error = worst;
  report.passed = worst <= report.tolerance;
  return report;
}

// Flipping one effectiveness sign must be caught by the round-trip check.
inline CheckReport mutation_sensitivity_check(const VehicleParams& params,
                                              int n_samples, std::uint64_t seed) {
  const CheckReport mutated = wrench_roundtrip_check(
      params, n_samples, seed, ModelMutation::FlipLateralYawSign);
  CheckReport report;
  report.name = "mutation_sensitivity";
  report.tolerance = mutated.tolerance;
  report.measured_error = mutated.measured_error;
  report.passed = !mutated.passed;
  report.witness = report.passed
                       ? "sign mutation detected by round-trip residual"
                       : "sign mutation went unnoticed";
  return report;
}

// Drag-free, thrust-free integration must conserve world-frame angular
// momentum and reproduce free-fall kinematics.
inline CheckReport conservation_check(const VehicleParams& params) {
  CheckReport report;
  report.name = "conservation";
  report.tolerance = 1e-6;

  VehicleParams p = params;
  p.drag_translational.setZero();
  p.drag_rotational.setZero();
  const ActuatorCommands no_thrust;
  const Disturbance none;
  const double dt = 1e-3;

  // Tumbling body: relative drift of R(eta) J w over one second.
  VehicleState s;
  s.body_rate = Vec3(1.0, 2.0, 3.0);
  const Vec3 momentum0 = euler_to_rotation(s.attitude) * (p.inertia * s.body_rate);
  double max_drift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    s = step(s, no_thrust, none, p, dt, i * dt);
    const Vec3 momentum = euler_to_rotation(s.attitude) * (p.inertia * s.body_rate);
    max_drift = std::max(max_drift,
                         (momentum - momentum0).norm() / momentum0.norm());
  }

  // Free fall from rest for one second.
  VehicleState f;
  for (int i = 0; i < 1000; ++i) {
    f = step(f, no_thrust, none, p, dt, i * dt);
  }
  const double fall_err = std::abs(f.position.z() + 4.905);

  // Spin about the principal z axis is a fixed point of the Euler equations.
  VehicleState spin;
  spin.body_rate = Vec3(0.0, 0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    spin = step(spin, no_thrust, none, p, dt, i * dt);
  }
  const double spin_drift = (spin.body_rate - Vec3(0.0, 0.0, 2.0)).norm();

  report.measured_error = std::max(max_drift, fall_err);
  report.passed = report.measured_error <= report.tolerance && spin_drift <= 1e-12;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "momentum drift %.3e, free-fall error %.3e m, spin drift %.3e",
                max_drift, fall_err, spin_drift);
  report.witness = buf;
  return report;
}

namespace detail {

// Smallest lateral acceleration at which the minimal-norm allocation
// saturates, found by bisection on the level-flight wrench.
inline double allocation_saturation_onset(const VehicleParams& params) {
  const EffectivenessMatrix eff = build_effectiveness(params);
  const double mg = params.weight();
  auto saturated = [&](double accel) {
    Wrench v;
    v.force = Vec3(params.mass * accel, 0.0, mg);
    return extract_commands(allocate(v, eff), params).any_saturated();
  };
  if (saturated(0.0)) {
    return 0.0;
  }
  double hi = 1.0;
  while (!saturated(hi)) {
    hi *= 2.0;
    if (hi > 1e4) {
      return hi;  // no saturation within any physical range
    }
  }
  double lo = hi * 0.5 > 1.0 ? hi * 0.5 : 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (saturated(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// The grid-search envelope and the allocation saturation onset must agree.
// The computed envelope for the configured vehicle is part of the report.
inline CheckReport envelope_crosscheck(const VehicleParams& params) {
  CheckReport report;
  report.name = "envelope_crosscheck";
  report.tolerance = 0.01;

  const double grid = feasible_lateral_accel(params).accel;
  const double onset = detail::allocation_saturation_onset(params);
  const double denom = std::max(onset, 1e-9);
  report.measured_error = std::abs(grid - onset) / denom;
  if (grid <= 1e-6 && onset <= 1e-6) {
    report.measured_error = 0.0;
  }
  report.passed = report.measured_error <= report.tolerance;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "lateral envelope %.4f m/s^2 (grid) vs %.4f m/s^2 (allocation sweep)",
                grid, onset);
  report.witness = buf;
  return report;
}

inline std::vector<CheckReport> run_all_checks(const VehicleParams& params,
                                               int n_samples = 1000,
                                               std::uint64_t seed = 42) {
  std::vector<CheckReport> reports;
  reports.push_back(least_squares_agreement_check(params, n_samples, seed));
  reports.push_back(wrench_roundtrip_check(params, n_samples, seed));
  reports.push_back(mutation_sensitivity_check(params, n_samples, seed));
  reports.push_back(conservation_check(params));
  reports.push_back(envelope_crosscheck(params));
  return reports;
}

}  // namespace tiltquad
