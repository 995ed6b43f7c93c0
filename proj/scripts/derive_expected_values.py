#!/usr/bin/env python3
"""Recomputes the frozen constants asserted in the C++ test suites.

Every hard-coded expected value in tests/ comes from one of the entries
below, evaluated with numpy/mpmath rather than the C++ library, so the
numbers can be regenerated and audited independently of the code under
test.  Run:  python3 scripts/derive_expected_values.py
"""

import math

import numpy as np

KX = math.sqrt(2.0) / 2.0

# Default vehicle configuration (see README parameter table).
MASS = 2.045          # kg
GRAVITY = 9.81        # m/s^2
ARM_LENGTH = 0.25     # m
K_T = 1.0e-5          # N s^2 / rad^2
K_Q = 0.016           # m (torque-to-thrust ratio)
BETA_MAX = math.radians(40.0)
T_MAX = 13.0          # N
SERVO_RATE = 20.94    # rad/s


def effectiveness_matrix(l=ARM_LENGTH, kq=K_Q):
    """6x12 effectiveness matrix; columns ordered (lon,lat,ver) per rotor."""
    b = np.zeros((6, 12))
    cols = {
        ("lat", 1): [0, 0, -l, KX, KX, 0],
        ("ver", 1): [-KX * l, -KX * l, -kq, 0, 0, 1],
        ("lat", 2): [0, 0, -l, -KX, -KX, 0],
        ("ver", 2): [KX * l, KX * l, -kq, 0, 0, 1],
        ("lat", 3): [0, 0, -l, -KX, KX, 0],
        ("ver", 3): [KX * l, -KX * l, kq, 0, 0, 1],
        ("lat", 4): [0, 0, -l, KX, -KX, 0],
        ("ver", 4): [-KX * l, KX * l, kq, 0, 0, 1],
    }
    for (kind, rotor), col in cols.items():
        offset = {"lon": 0, "lat": 1, "ver": 2}[kind]
        b[:, 3 * (rotor - 1) + offset] = col
    return b


def least_squares_min_norm(b, v):
    """Minimal-norm exact solution via numpy pinv (independent oracle)."""
    return np.linalg.pinv(b) @ v


def main():
    out = []

    def emit(name, value, note=""):
        if isinstance(value, float):
            out.append(f"{name} = {value!r}  {note}")
        else:
            out.append(f"{name} = {value}  {note}")

    emit("sqrt2_over_2", KX)

    # geometry: rot_z(315 deg) upper-left block
    a = math.radians(315.0)
    emit("rot_z_315_cos", math.cos(a))
    emit("rot_z_315_minus_sin", -math.sin(a))

    # vehicle: rotor force at 10 N, 40 deg tilt
    emit("rotor_force_lat_10N_40deg", 10.0 * math.sin(BETA_MAX))
    emit("rotor_force_ver_10N_40deg", 10.0 * math.cos(BETA_MAX))

    # vehicle: thrust model spot value
    emit("thrust_kT1e-5_omega1000", K_T * 1000.0**2)

    # allocation: hover wrench
    mg = MASS * GRAVITY
    emit("hover_total_weight_N", mg)
    emit("hover_per_rotor_thrust_N", mg / 4.0)
    emit("hover_motor_normalized", mg / 4.0 / T_MAX)

    b = effectiveness_matrix()
    v_hover = np.array([0, 0, 0, 0, 0, mg])
    u = least_squares_min_norm(b, v_hover)
    emit("hover_u_ver_components", [round(x, 10) for x in u[2::3]])
    emit("hover_u_lat_max_abs", float(np.max(np.abs(u[1::3]))))

    # allocation: pure x-force 4 N
    v_x = np.array([0, 0, 0, 4.0, 0, 0])
    ux = least_squares_min_norm(b, v_x)
    emit("pure_x4N_lat_components", [round(x, 10) for x in ux[1::3]])
    emit("pure_x4N_expected_lat_magnitude", 4.0 / (4.0 * KX))
    emit("pure_x4N_ver_max_abs", float(np.max(np.abs(ux[2::3]))))

    emit("rank_B", int(np.linalg.matrix_rank(b)))

    # extraction examples
    emit("extract_T_(0,1,5)", math.hypot(1.0, 5.0))
    emit("extract_beta_(0,1,5)", math.atan2(1.0, 5.0))
    emit("extract_beta_unclamped_(0,6,5)_deg", math.degrees(math.atan2(6.0, 5.0)))

    # lateral-acceleration envelope at level attitude:
    # all four rotors tilt +-beta_max in the (+,-,-,+) pattern, f_ver = mg/4.
    a_env = KX * GRAVITY * math.tan(BETA_MAX)
    emit("lateral_accel_envelope_default", a_env)
    t_at_env = (mg / 4.0) / math.cos(BETA_MAX)
    emit("per_rotor_thrust_at_envelope_N", t_at_env, "(< T_MAX, tilt binds first)")

    # free fall kinematics, 1 s
    emit("free_fall_dz_1s", -0.5 * GRAVITY * 1.0**2)

    # servo slew
    emit("servo_slew_10ms", SERVO_RATE * 0.01)
    emit("servo_time_0_to_40deg_s", BETA_MAX / SERVO_RATE)

    # controller cascade spot value: 1 m x error, pos_p=1, vel_p=2
    emit("cascade_fx_over_mass", 1.0 * 1.0 * 2.0)

    # conventional tilt example: f_des=(mg tan10deg, 0, mg) -> pitch 10 deg
    emit("bodyz_pitch_example_rad", math.atan2(mg * math.tan(math.radians(10)), mg))

    print("\n".join(out))


if __name__ == "__main__":
    main()
