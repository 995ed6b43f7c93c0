#include <catch_amalgamated.hpp>

#include <random>

#include "tiltquad/geometry.hpp"

using namespace tiltquad;

namespace {

bool is_rotation(const Mat3& r, double tol = 1e-12) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

EulerAngles random_attitude(std::mt19937_64& rng, double pitch_limit) {
  std::uniform_real_distribution<double> angle(-kPi + 1e-6, kPi);
  std::uniform_real_distribution<double> pitch(-pitch_limit, pitch_limit);
  return {angle(rng), pitch(rng), angle(rng)};
}

}  // namespace

TEST_CASE("rot_z basic angles") {
  CHECK((rot_z(0.0) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);

  const Mat3 half_turn = rot_z(kPi);
  Mat3 expected;
  expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK((half_turn - expected).cwiseAbs().maxCoeff() < 1e-15);

  const Mat3 r = rot_z(deg2rad(315.0));
  const double c = 0.7071067811865476;
  CHECK(r(0, 0) == Catch::Approx(c).margin(1e-15));
  CHECK(r(0, 1) == Catch::Approx(c).margin(1e-15));   // -sin(315) = +sqrt2/2
  CHECK(r(1, 0) == Catch::Approx(-c).margin(1e-15));
  CHECK(r(1, 1) == Catch::Approx(c).margin(1e-15));
  CHECK(r(2, 2) == 1.0);
}

TEST_CASE("rotor frames match the X configuration") {
  CHECK((rotor_frame(3) - rot_z(deg2rad(45.0))).cwiseAbs().maxCoeff() == 0.0);

  // Lateral (tilt force) directions in the body frame.
  const double c = 0.7071067811865476;
  const Vec3 lat1 = rotor_frame(1).col(1);
  CHECK(lat1.x() == Catch::Approx(c).margin(1e-15));
  CHECK(lat1.y() == Catch::Approx(c).margin(1e-15));
  CHECK(lat1.z() == 0.0);

  const Vec3 lat2 = rotor_frame(2).col(1);
  CHECK(lat2.x() == Catch::Approx(-c).margin(1e-15));
  CHECK(lat2.y() == Catch::Approx(-c).margin(1e-15));

  CHECK_THROWS_AS(rotor_frame(0), std::out_of_range);
  CHECK_THROWS_AS(rotor_frame(5), std::out_of_range);
}

TEST_CASE("rotor lateral axes are tangential to the arms") {
  for (int i = 1; i <= 4; ++i) {
    const Mat3 frame = rotor_frame(i);
    CHECK(std::abs(frame.col(0).dot(frame.col(1))) <= 1e-12);
  }
}

TEST_CASE("euler_to_rotation basics") {
  CHECK((euler_to_rotation({0, 0, 0}) - Mat3::Identity()).cwiseAbs().maxCoeff() ==
        0.0);
  const double psi = 0.73;
  CHECK((euler_to_rotation({0, 0, psi}) - rot_z(psi)).cwiseAbs().maxCoeff() <
        1e-15);
}

TEST_CASE("euler round trip over random attitudes") {
  std::mt19937_64 rng(20240814);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const EulerAngles eta = random_attitude(rng, deg2rad(88.0));
    const EulerAngles back = rotation_to_euler(euler_to_rotation(eta));
    worst = std::max(worst, std::abs(back.roll - eta.roll));
    worst = std::max(worst, std::abs(back.pitch - eta.pitch));
    worst = std::max(worst, std::abs(back.yaw - eta.yaw));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("rotation matrices are orthonormal with unit determinant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
  for (int i = 0; i < 200; ++i) {
    CHECK(is_rotation(rot_z(angle(rng))));
    CHECK(is_rotation(euler_to_rotation(random_attitude(rng, deg2rad(89.0)))));
  }
  for (int i = 1; i <= 4; ++i) {
    CHECK(is_rotation(rotor_frame(i)));
  }
}

TEST_CASE("rot_z composes additively") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const double a = angle(rng);
    const double b = angle(rng);
    CHECK((rot_z(a) * rot_z(b) - rot_z(a + b)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("euler rate matrix") {
  CHECK((euler_rate_matrix({0, 0, 0}) - Mat3::Identity()).cwiseAbs().maxCoeff() ==
        0.0);

  // roll = pi/2, pitch = 0
  const Mat3 h = euler_rate_matrix({kPi / 2.0, 0.0, 0.0});
  Mat3 expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(euler_rate_matrix({0.0, kPi / 2.0, 0.0}), SingularAttitudeError);
}

TEST_CASE("euler rate matrix inverts cleanly away from the singularity") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const EulerAngles eta = random_attitude(rng, deg2rad(80.0));
    const Mat3 h = euler_rate_matrix(eta);
    CHECK((h * h.inverse() - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("wrap_pi maps into (-pi, pi]") {
  CHECK(wrap_pi(kPi) == Catch::Approx(kPi));
  CHECK(wrap_pi(-kPi) == Catch::Approx(kPi));
  CHECK(wrap_pi(3.0 * kPi) == Catch::Approx(kPi));
  CHECK(wrap_pi(0.1) == Catch::Approx(0.1));
  CHECK(wrap_pi(2.0 * kPi + 0.1) == Catch::Approx(0.1));
  CHECK(wrap_pi(-0.1 - 2.0 * kPi) == Catch::Approx(-0.1));
}
