// Frame conventions, rotation matrices, Euler-rate kinematics, and the four
// rotor-frame orientations.
//
// Frames:
//   world   z-up, right-handed; gravity is (0, 0, -kGravity)
//   body    x forward, y left, z up; attitude is yaw-pitch-roll (ZYX) Euler
//   rotor i x along the arm, y tangential (tilt force direction), z along
//           the untilted thrust axis; obtained from the body frame by a
//           rotation about z (rotor 1: 315 deg, 2: 135, 3: 45, 4: 225)

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tiltquad/types.hpp"

namespace tiltquad {

// Wraps an angle into (-pi, pi].
inline double wrap_pi(double angle) {
  double w = std::fmod(angle + kPi, 2.0 * kPi);
  if (w <= 0.0) {
    w += 2.0 * kPi;
  }
  return w - kPi;
}

// Roll/pitch/yaw in radians.  Valid ranges: roll, yaw in (-pi, pi],
// pitch in [-pi/2, pi/2].
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  EulerAngles wrapped() const {
    return {wrap_pi(roll), pitch, wrap_pi(yaw)};
  }
};

inline Mat3 rot_x(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

inline Mat3 rot_y(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

inline Mat3 rot_z(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

// Arm azimuths of the X configuration, indexed by rotor number 1..4.
inline constexpr std::array<double, 4> kRotorAzimuthDeg = {315.0, 135.0, 45.0,
                                                           225.0};

// Orientation of rotor frame i (1..4) with respect to the body frame.
inline Mat3 rotor_frame(int rotor) {
  if (rotor < 1 || rotor > kNumRotors) {
    throw std::out_of_range("rotor_frame: rotor index must be in 1..4, got " +
                            std::to_string(rotor));
  }
  return rot_z(deg2rad(kRotorAzimuthDeg[static_cast<size_t>(rotor - 1)]));
}

// Body-to-world rotation for a ZYX (yaw-pitch-roll) Euler attitude.
inline Mat3 euler_to_rotation(const EulerAngles& eta) {
  return rot_z(eta.yaw) * rot_y(eta.pitch) * rot_x(eta.roll);
}

// Inverse of euler_to_rotation.  At |pitch| = pi/2 the roll/yaw split is not
// unique; roll is reported as zero there.
inline EulerAngles rotation_to_euler(const Mat3& r) {
  double sp = -r(2, 0);
  sp = std::clamp(sp, -1.0, 1.0);
  EulerAngles eta;
  eta.pitch = std::asin(sp);
  if (std::abs(sp) < 1.0 - 1e-9) {
    eta.roll = std::atan2(r(2, 1), r(2, 2));
    eta.yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    eta.roll = 0.0;
    eta.yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return eta;
}

// H(eta) mapping body angular velocity to Euler-angle rates, eta_dot = H w.
// Throws SingularAttitudeError when |cos(pitch)| <= tol.
inline Mat3 euler_rate_matrix(const EulerAngles& eta,
                              double tol = kGimbalSingularityTol) {
  const double ct = std::cos(eta.pitch);
  if (std::abs(ct) <= tol) {
    throw SingularAttitudeError(
        "euler_rate_matrix: pitch within tolerance of +-90 deg (cos = " +
        std::to_string(ct) + ")");
  }
  const double cf = std::cos(eta.roll);
  const double sf = std::sin(eta.roll);
  const double tt = std::tan(eta.pitch);
  Mat3 h;
  h << 1, sf * tt, cf * tt,
       0, cf, -sf,
       0, sf / ct, cf / ct;
  return h;
}

}  // namespace tiltquad
