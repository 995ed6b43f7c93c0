// Core value types, constants, and error taxonomy shared by all modules.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace tiltquad {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat12x6 = Eigen::Matrix<double, 12, 6>;

inline constexpr int kNumRotors = 4;

// World frame is z-up; gravity acts along -z.
inline constexpr double kGravity = 9.81;

// sqrt(2)/2: projection of the 45-degree arm directions onto the body axes.
inline constexpr double kAxisFactor = 0.70710678118654752440;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Attitude kinematics break down as pitch approaches +-90 deg; below this
// |cos(pitch)| the Euler-rate matrix is treated as singular.
inline constexpr double kGimbalSingularityTol = 1e-6;

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int field = -1)
      : std::runtime_error(what), line(line), field(field) {}
  int line;
  int field;  // 1-based field index within the line, -1 if not applicable
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularAttitudeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrationDivergedError : std::runtime_error {
  IntegrationDivergedError(const std::string& what, double time_s)
      : std::runtime_error(what), time_s(time_s) {}
  double time_s;
};

struct DegenerateMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDirectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tiltquad
