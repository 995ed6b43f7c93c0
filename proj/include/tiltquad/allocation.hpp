// Control-effectiveness matrix, minimal-norm wrench allocation, and the
// conversion from per-rotor force components to rotor/servo commands.
//
// The actuator-force vector u stacks (f_lon, f_lat, f_ver) per rotor in
// rotor-frame components, twelve entries total.  The wrench vector v is
// (tau_x, tau_y, tau_z, f_x, f_y, f_z) in the body frame, so v = B u with
// B the 6x12 effectiveness matrix.  The f_lon columns of B are zero: a
// single-axis gimbal cannot produce force along its own arm.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "tiltquad/types.hpp"
#include "tiltquad/vehicle.hpp"

namespace tiltquad {

// Rotor-frame force components, u of the allocation problem.
struct ActuatorForces {
  Vec12 u = Vec12::Zero();

  double longitudinal(int rotor) const { return u(3 * (rotor - 1) + 0); }
  double lateral(int rotor) const { return u(3 * (rotor - 1) + 1); }
  double vertical(int rotor) const { return u(3 * (rotor - 1) + 2); }

  double& longitudinal(int rotor) { return u(3 * (rotor - 1) + 0); }
  double& lateral(int rotor) { return u(3 * (rotor - 1) + 1); }
  double& vertical(int rotor) { return u(3 * (rotor - 1) + 2); }
};

// Per-rotor sign patterns of the effectiveness matrix.  The lateral force
// of rotor i acts along (-sin, cos) of its arm azimuth; the vertical force
// applies roll/pitch moments through the arm lever and a yaw reaction
// moment through the rotor drag torque (rotors 1,2 spin positive).
namespace detail {
inline constexpr std::array<double, 4> kFxSign = {+1, -1, -1, +1};
inline constexpr std::array<double, 4> kFySign = {+1, -1, +1, -1};
inline constexpr std::array<double, 4> kTxSign = {-1, +1, +1, -1};
inline constexpr std::array<double, 4> kTySign = {-1, +1, -1, +1};
inline constexpr std::array<double, 4> kTzSign = {-1, -1, +1, +1};
}  // namespace detail

// Moore-Penrose pseudo-inverse with a relative singular-value cutoff of
// 1e-10 * sigma_max.  For a full-row-rank B this equals B^T (B B^T)^-1.
inline Mat12x6 pseudo_inverse(const Mat6x12& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(b),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  if (!(sigma_max > 0.0)) {
    throw DegenerateMatrixError("pseudo_inverse: matrix has no nonzero singular values");
  }
  const double cutoff = 1e-10 * sigma_max;
  Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) {
      inv_sigma(i) = 1.0 / sigma(i);
    }
  }
  Eigen::MatrixXd pinv =
      svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
  return Mat12x6(pinv);
}

// B and its cached pseudo-inverse.  Immutable after construction.
class EffectivenessMatrix {
 public:
  EffectivenessMatrix(const Mat6x12& b, double sv_cutoff_rel = 1e-10)
      : b_(b), pinv_(pseudo_inverse(b)), sv_cutoff_rel_(sv_cutoff_rel) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd((Eigen::MatrixXd(b)));
    const Eigen::VectorXd& sigma = svd.singularValues();
    rank_ = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) > sv_cutoff_rel_ * sigma(0)) {
        ++rank_;
      }
    }
  }

  const Mat6x12& matrix() const { return b_; }
  const Mat12x6& inverse() const { return pinv_; }
  int rank() const { return rank_; }
  double singular_value_cutoff() const { return sv_cutoff_rel_; }

 private:
  Mat6x12 b_;
  Mat12x6 pinv_;
  double sv_cutoff_rel_;
  int rank_ = 0;
};

// Builds B from the vehicle geometry.  With tilt disabled (conventional
// quadrotor mode) the lateral columns are zeroed as well, leaving only the
// four vertical-thrust channels and a rank-4 matrix.
inline EffectivenessMatrix build_effectiveness(const VehicleParams& p,
                                               bool tilt_enabled = true) {
  const double l = p.arm_length;
  const double kxl = kAxisFactor * l;
  Mat6x12 b = Mat6x12::Zero();
  for (int i = 0; i < kNumRotors; ++i) {
    const int lat = 3 * i + 1;
    const int ver = 3 * i + 2;
    if (tilt_enabled) {
      b(2, lat) = -l;
      b(3, lat) = detail::kFxSign[i] * kAxisFactor;
      b(4, lat) = detail::kFySign[i] * kAxisFactor;
    }
    b(0, ver) = detail::kTxSign[i] * kxl;
    b(1, ver) = detail::kTySign[i] * kxl;
    b(2, ver) = detail::kTzSign[i] * p.torque_ratio;
    b(5, ver) = 1.0;
  }
  return EffectivenessMatrix(b);
}

// Minimal-norm exact solution u = B^+ v.
inline ActuatorForces allocate(const Wrench& v, const EffectivenessMatrix& eff) {
  ActuatorForces out;
  out.u = eff.inverse() * v.to_vector();
  return out;
}

struct ExtractionResult {
  ActuatorCommands commands;
  std::array<bool, 4> thrust_saturated = {false, false, false, false};
  std::array<bool, 4> tilt_saturated = {false, false, false, false};

  bool any_saturated() const {
    for (int i = 0; i < kNumRotors; ++i) {
      if (thrust_saturated[i] || tilt_saturated[i]) return true;
    }
    return false;
  }
};

// Converts actuator forces to signed rotor speeds and tilt angles.
// Thrust is the Euclidean norm of the force components (never negative);
// the tilt angle comes from the two-argument arctangent and is clamped to
// +-beta_max with a saturation flag.  Thrust above the per-rotor ceiling is
// clamped and flagged likewise.  Flags carry a tiny tolerance so values
// sitting exactly on a limit do not trip on roundoff.
inline ExtractionResult extract_commands(const ActuatorForces& u,
                                         const VehicleParams& p) {
  ExtractionResult res;
  const double ceiling = p.thrust_ceiling();
  for (int i = 1; i <= kNumRotors; ++i) {
    const double lon = u.longitudinal(i);
    const double lat = u.lateral(i);
    const double ver = u.vertical(i);
    double thrust = std::sqrt(lon * lon + lat * lat + ver * ver);
    if (thrust > ceiling) {
      res.thrust_saturated[i - 1] = thrust > ceiling * (1.0 + 1e-9);
      thrust = ceiling;
    }
    double beta = (lat == 0.0 && ver == 0.0) ? 0.0 : std::atan2(lat, ver);
    beta += p.servo_trim;
    if (std::abs(beta) > p.beta_max) {
      res.tilt_saturated[i - 1] = std::abs(beta) > p.beta_max + 1e-12;
      beta = std::clamp(beta, -p.beta_max, p.beta_max);
    }
    res.commands.rotor_speed[i - 1] =
        kRotorSpinSign[i - 1] * std::sqrt(thrust / p.thrust_coeff);
    res.commands.tilt[i - 1] = beta;
  }
  return res;
}

// Normalized actuator outputs: motors in [0, 1], servos in [-1, 1].
struct NormalizedOutputs {
  std::array<double, 4> motor = {0, 0, 0, 0};
  std::array<double, 4> servo = {0, 0, 0, 0};
  std::array<bool, 4> motor_saturated = {false, false, false, false};
  std::array<bool, 4> servo_saturated = {false, false, false, false};
};

inline NormalizedOutputs normalize(const ActuatorCommands& cmds,
                                   const VehicleParams& p) {
  NormalizedOutputs out;
  for (int i = 0; i < kNumRotors; ++i) {
    const double thrust =
        p.thrust_coeff * cmds.rotor_speed[i] * cmds.rotor_speed[i];
    double motor = thrust / p.thrust_max;
    if (motor < 0.0 || motor > 1.0) {
      out.motor_saturated[i] = motor > 1.0 + 1e-9;
      motor = std::clamp(motor, 0.0, 1.0);
    }
    double servo = cmds.tilt[i] / p.beta_max;
    if (servo < -1.0 || servo > 1.0) {
      out.servo_saturated[i] = std::abs(servo) > 1.0 + 1e-9;
      servo = std::clamp(servo, -1.0, 1.0);
    }
    out.motor[i] = motor;
    out.servo[i] = servo;
  }
  return out;
}

// Variant that carries the extraction-stage saturation flags through.
inline NormalizedOutputs normalize(const ExtractionResult& extraction,
                                   const VehicleParams& p) {
  NormalizedOutputs out = normalize(extraction.commands, p);
  for (int i = 0; i < kNumRotors; ++i) {
    out.motor_saturated[i] = out.motor_saturated[i] || extraction.thrust_saturated[i];
    out.servo_saturated[i] = out.servo_saturated[i] || extraction.tilt_saturated[i];
  }
  return out;
}

inline ActuatorCommands denormalize(const NormalizedOutputs& n,
                                    const VehicleParams& p) {
  ActuatorCommands cmds;
  for (int i = 0; i < kNumRotors; ++i) {
    const double thrust = n.motor[i] * p.thrust_max;
    cmds.rotor_speed[i] = kRotorSpinSign[i] * std::sqrt(thrust / p.thrust_coeff);
    cmds.tilt[i] = n.servo[i] * p.beta_max;
  }
  return cmds;
}

struct LateralEnvelope {
  double accel = 0.0;            // m/s^2, along +x at level attitude
  ActuatorForces actuator_forces;
  std::array<double, 4> tilt = {0, 0, 0, 0};
};

namespace detail {

// Solves for the per-rotor vertical forces that hold level hover with zero
// residual torque and zero sideways force at a given tilt assignment.
// Returns false if no consistent non-negative solution exists within the
// thrust ceiling.
inline bool solve_vertical_split(const std::array<double, 4>& tilt,
                                 const VehicleParams& p,
                                 std::array<double, 4>* f_ver,
                                 double* accel) {
  const double l = p.arm_length;
  const double kxl = kAxisFactor * l;
  const double mg = p.weight();
  const double ceiling = p.thrust_ceiling();
  std::array<double, 4> t{};
  for (int i = 0; i < 4; ++i) {
    t[i] = std::tan(tilt[i]);
  }

  Eigen::Matrix<double, 5, 4> a;
  a.row(0) << -kxl, kxl, kxl, -kxl;                     // tau_x = 0
  a.row(1) << -kxl, kxl, -kxl, kxl;                     // tau_y = 0
  a.row(2) << -p.torque_ratio - l * t[0], -p.torque_ratio - l * t[1],
              p.torque_ratio - l * t[2], p.torque_ratio - l * t[3];  // tau_z = 0
  a.row(3) << kAxisFactor * t[0], -kAxisFactor * t[1],
              kAxisFactor * t[2], -kAxisFactor * t[3];  // f_y = 0
  a.row(4) << 1, 1, 1, 1;                               // f_z = mg
  Eigen::Matrix<double, 5, 1> rhs;
  rhs << 0, 0, 0, 0, mg;

  const Eigen::Vector4d f = a.colPivHouseholderQr().solve(rhs);
  if ((a * f - rhs).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, mg)) {
    return false;
  }
  double fx = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (f(i) < -1e-9) {
      return false;
    }
    const double thrust = f(i) * std::sqrt(1.0 + t[i] * t[i]);
    if (thrust > ceiling + 1e-9) {
      return false;
    }
    fx += kFxSign[i] * kAxisFactor * t[i] * f(i);
    (*f_ver)[i] = f(i);
  }
  *accel = fx / p.mass;
  return true;
}

}  // namespace detail

// Maximum steady lateral acceleration at level attitude: brute-force grid
// over the four tilt angles, keeping assignments that hold weight with zero
// residual torque, plus a fine scan of the symmetric (+d, -d, -d, +d)
// family that contains the optimum.  Throws InfeasibleError when the
// vehicle cannot hover at all.
inline LateralEnvelope feasible_lateral_accel(const VehicleParams& p,
                                              int grid_points_per_axis = 13) {
  const double mg = p.weight();
  const double ceiling = p.thrust_ceiling();
  if (mg > 4.0 * ceiling) {
    throw InfeasibleError("feasible_lateral_accel: weight exceeds total thrust");
  }

  LateralEnvelope best;
  auto consider = [&](const std::array<double, 4>& tilt) {
    std::array<double, 4> f_ver{};
    double accel = 0.0;
    if (!detail::solve_vertical_split(tilt, p, &f_ver, &accel)) {
      return;
    }
    if (accel > best.accel) {
      best.accel = accel;
      best.tilt = tilt;
      for (int i = 1; i <= 4; ++i) {
        best.actuator_forces.longitudinal(i) = 0.0;
        best.actuator_forces.lateral(i) = std::tan(tilt[i - 1]) * f_ver[i - 1];
        best.actuator_forces.vertical(i) = f_ver[i - 1];
      }
    }
  };

  const int n = std::max(3, grid_points_per_axis | 1);  // odd, includes 0 and ends
  std::vector<double> grid(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    grid[static_cast<size_t>(k)] = -p.beta_max + 2.0 * p.beta_max * k / (n - 1);
  }
  for (double b1 : grid) {
    for (double b2 : grid) {
      for (double b3 : grid) {
        for (double b4 : grid) {
          consider({b1, b2, b3, b4});
        }
      }
    }
  }

  // Symmetric family: equal vertical split mg/4 with tilt pattern
  // (+d, -d, -d, +d).  The largest usable d is limited by either the tilt
  // range or the thrust ceiling at f_ver = mg/4.
  double d_limit = p.beta_max;
  const double cos_cap = mg / (4.0 * ceiling);
  if (cos_cap <= 1.0) {
    d_limit = std::min(d_limit, std::acos(cos_cap));
  }
  const int fine = 2001;
  for (int k = 0; k <= fine; ++k) {
    const double d = d_limit * k / fine;
    consider({d, -d, -d, d});
  }
  consider({d_limit, -d_limit, -d_limit, d_limit});

  return best;
}

}  // namespace tiltquad
