#include <catch_amalgamated.hpp>

#include <random>

#include "tiltquad/verify.hpp"

using namespace tiltquad;

TEST_CASE("least-squares oracle agrees with the SVD route") {
  VehicleParams p;
  const EffectivenessMatrix eff = build_effectiveness(p);

  SECTION("zero wrench") {
    CHECK(oracle_least_squares(eff.matrix(), Wrench{}).u.cwiseAbs().maxCoeff() ==
          0.0);
  }

  SECTION("hover wrench") {
    Wrench hover;
    hover.force = Vec3(0, 0, p.weight());
    const ActuatorForces a = allocate(hover, eff);
    const ActuatorForces b = oracle_least_squares(eff.matrix(), hover);
    CHECK((a.u - b.u).cwiseAbs().maxCoeff() <= 1e-9);
  }

  SECTION("random batch") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Wrench v = sample_wrench(rng);
      const ActuatorForces a = allocate(v, eff);
      const ActuatorForces b = oracle_least_squares(eff.matrix(), v);
      worst = std::max(worst, (a.u - b.u).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-8);
  }

  SECTION("oracle solutions are exact and in the row space") {
    std::mt19937_64 rng(2025);
    for (int i = 0; i < 100; ++i) {
      const Wrench v = sample_wrench(rng);
      const ActuatorForces u = oracle_least_squares(eff.matrix(), v);
      CHECK((eff.matrix() * u.u - v.to_vector()).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  SECTION("rank-deficient matrix is reported") {
    Mat6x12 degenerate = eff.matrix();
    degenerate.row(3) = degenerate.row(4);
    CHECK_THROWS_AS(oracle_least_squares(degenerate, Wrench{}),
                    DegenerateMatrixError);
  }
}

TEST_CASE("wrench round-trip check") {
  VehicleParams p;

  SECTION("hover wrench is exact") {
    const EffectivenessMatrix eff = build_effectiveness(p);
    Wrench hover;
    hover.force = Vec3(0, 0, p.weight());
    const ExtractionResult ex = extract_commands(allocate(hover, eff), p);
    const Wrench back = propulsive_wrench(ex.commands, p);
    CHECK((back.to_vector() - hover.to_vector()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SECTION("random batch passes") {
    const CheckReport r = wrench_roundtrip_check(p, 1000, 7);
    CHECK(r.passed);
    CHECK(r.measured_error <= 1e-6);
  }

  SECTION("sign mutation breaks the check") {
    const CheckReport r =
        wrench_roundtrip_check(p, 1000, 7, ModelMutation::FlipLateralYawSign);
    CHECK_FALSE(r.passed);
    CHECK(r.measured_error > 1e-3);
  }

  SECTION("mutation sensitivity wrapper") {
    const CheckReport r = mutation_sensitivity_check(p, 500, 7);
    CHECK(r.passed);
  }

  SECTION("deterministic under a fixed seed") {
    const CheckReport a = wrench_roundtrip_check(p, 200, 99);
    const CheckReport b = wrench_roundtrip_check(p, 200, 99);
    CHECK(a.measured_error == b.measured_error);
    CHECK(a.witness == b.witness);
  }
}

TEST_CASE("conservation check") {
  VehicleParams p;
  const CheckReport r = conservation_check(p);
  CHECK(r.passed);
  CHECK(r.measured_error <= 1e-6);
}

TEST_CASE("envelope crosscheck") {
  VehicleParams p;

  SECTION("default vehicle agrees within 1 percent") {
    const CheckReport r = envelope_crosscheck(p);
    CHECK(r.passed);
    CHECK(r.measured_error <= 0.01);
    CHECK(r.witness.find("lateral envelope") != std::string::npos);
  }

  SECTION("degenerate tilt range agrees at zero") {
    VehicleParams narrow = p;
    narrow.beta_max = 1e-9;
    const CheckReport r = envelope_crosscheck(narrow);
    CHECK(r.passed);
  }

  SECTION("envelope grows with the tilt range") {
    double last = 0.0;
    for (double deg : {5.0, 10.0, 20.0, 30.0, 40.0}) {
      VehicleParams q = p;
      q.beta_max = deg2rad(deg);
      const double env = feasible_lateral_accel(q).accel;
      CHECK(env >= last - 1e-12);
      last = env;
    }
  }
}

TEST_CASE("report line format") {
  CheckReport r;
  r.name = "example";
  r.passed = true;
  r.measured_error = 1.5e-9;
  r.tolerance = 1e-6;
  const std::string line = to_line(r);
  CHECK(line.find("example PASS") == 0);
  CHECK(line.find("1.500e-09") != std::string::npos);
  CHECK(line.find("1.000e-06") != std::string::npos);
}

TEST_CASE("full check suite passes on the default vehicle") {
  VehicleParams p;
  const std::vector<CheckReport> reports = run_all_checks(p, 500, 11);
  REQUIRE(reports.size() == 5);
  for (const CheckReport& r : reports) {
    INFO(to_line(r));
    CHECK(r.passed);
  }
}
