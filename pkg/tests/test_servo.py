import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tvcgimbal.servo import (
    LN20, PwmConvention, ServoParams, ServoState, analytic_rise_time,
    calibrate_time_constant, pwm_decode, pwm_encode, servo_step,
)

TAU = 44.5 / math.log(20)
FREE = ServoParams(rate_limit=1e9)  # lag only


def test_pwm_encode_examples():
    assert pwm_encode(0.0) == (1500.0, False)
    assert pwm_encode(15.0) == (1650.0, False)
    assert pwm_encode(-120.0) == (500.0, True)
    assert pwm_encode(120.0) == (2500.0, True)


def test_pwm_decode_examples():
    assert pwm_decode(1500) == 0.0
    assert pwm_decode(1650) == 15.0
    with pytest.raises(ValueError, match="2600"):
        pwm_decode(2600)


def test_pwm_round_trip_sweep():
    conv = PwmConvention()
    tol = conv.quantum / conv.slope
    for theta in np.linspace(-90, 90, 20001):
        pulse, sat = pwm_encode(theta, conv)
        assert not sat
        assert abs(pwm_decode(pulse, conv) - theta) <= tol / 2 + 1e-12


@given(st.floats(-100, 100))
def test_pwm_round_trip_property(theta):
    pulse, _ = pwm_encode(theta)
    assert abs(pwm_decode(pulse) - theta) <= 0.05 + 1e-12


def test_pwm_convention_validation():
    with pytest.raises(ValueError):
        PwmConvention(center_pulse=400)
    with pytest.raises(ValueError):
        PwmConvention(slope=0)


def test_servo_step_one_time_constant():
    s = ServoState(trial_tau=14.85).command(15.0, FREE)
    s = servo_step(s, 14.85, FREE)
    assert s.shaft_angle == pytest.approx(15 * (1 - math.exp(-1)), abs=1e-12)
    assert s.shaft_angle == pytest.approx(9.482, abs=5e-4)


def test_servo_step_fixed_point():
    s = ServoState(shaft_angle=7.0, commanded_angle=7.0)
    for dt in (0.01, 1.0, 1000.0):
        assert servo_step(s, dt, ServoParams()).shaft_angle == 7.0


def test_servo_reaches_95_percent_at_44_5ms():
    s = ServoState(trial_tau=TAU).command(15.0, FREE)
    s = servo_step(s, 44.5, FREE)
    assert s.shaft_angle == pytest.approx(0.95 * 15, abs=1e-9)


def test_servo_rejects_nonpositive_dt():
    with pytest.raises(ValueError):
        servo_step(ServoState(), 0.0, ServoParams())


def test_rate_limit_binds():
    p = ServoParams(rate_limit=100.0)  # 0.1 deg per ms
    s = ServoState(trial_tau=1.0).command(30.0, p)
    s = servo_step(s, 1.0, p)
    assert s.shaft_angle == pytest.approx(0.1)


def test_default_rate_limit_does_not_bind_on_15_deg_steps():
    p = ServoParams()
    s = ServoState(trial_tau=TAU).command(15.0, p)
    free = servo_step(s, 1.0, FREE)
    assert servo_step(s, 1.0, p).shaft_angle == free.shaft_angle


def test_bias_shifts_steady_state():
    s = ServoState(trial_bias=0.3, trial_tau=TAU).command(15.0, FREE)
    for _ in range(1000):
        s = servo_step(s, 1.0, FREE)
    assert s.shaft_angle == pytest.approx(15.3, abs=1e-9)


def test_travel_clamp_fuzz():
    p = ServoParams(max_travel=20.0, rate_limit=5000.0)
    rng = np.random.default_rng(7)
    s = ServoState(trial_tau=5.0)
    for cmd, dt, bias in zip(rng.uniform(-60, 60, 100_000), rng.uniform(0.01, 30, 100_000),
                             rng.normal(0, 3, 100_000)):
        s = ServoState(s.shaft_angle, 0.0, float(bias), 5.0).command(float(cmd), p)
        s = servo_step(s, float(dt), p)
        assert abs(s.shaft_angle) <= p.max_travel
        assert abs(s.commanded_angle) <= p.max_travel


@settings(max_examples=300)
@given(st.floats(-90, 90), st.floats(-90, 90), st.floats(1e-3, 500), st.floats(1, 40))
def test_step_is_contraction(theta, cmd, dt, tau):
    s = ServoState(theta, cmd, 0.0, tau)
    out = servo_step(s, dt, ServoParams())
    assert abs(out.shaft_angle - cmd) <= abs(theta - cmd) + 1e-12


def test_exact_update_matches_fine_euler():
    # independent oracle: forward Euler of d(theta)/dt = (cmd - theta)/tau at 1 us
    tau, cmd = TAU, 15.0
    h = 1e-3  # ms
    theta_e = 0.0
    s = ServoState(trial_tau=tau).command(cmd, FREE)
    worst = 0.0
    for ms in range(1, 201):
        for _ in range(1000):
            theta_e += h * (cmd - theta_e) / tau
        s = servo_step(s, 1.0, FREE)
        worst = max(worst, abs(s.shaft_angle - theta_e))
    assert worst < 1e-3


def test_continuous_95_crossing():
    s = ServoState(trial_tau=14.854).command(15.0, FREE)
    h, t, prev = 0.01, 0.0, 0.0
    while s.shaft_angle < 0.95 * 15:
        prev = s.shaft_angle
        s = servo_step(s, h, FREE)
        t += h
    crossing = t - h + h * (0.95 * 15 - prev) / (s.shaft_angle - prev)
    assert crossing == pytest.approx(44.5, abs=0.05)


def test_calibrate_time_constant():
    assert calibrate_time_constant(44.5) == pytest.approx(14.854, abs=5e-4)
    assert calibrate_time_constant(math.log(20)) == pytest.approx(1.0, rel=1e-15)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            calibrate_time_constant(bad)


def test_analytic_rise_time():
    assert analytic_rise_time(14.854) == pytest.approx(44.5, abs=2e-3)
    assert analytic_rise_time(1.0) == pytest.approx(2.9957, abs=1e-4)
    with pytest.raises(ValueError):
        analytic_rise_time(0.0)


@given(st.floats(1e-3, 1e4))
def test_rise_time_round_trip(x):
    assert analytic_rise_time(calibrate_time_constant(x)) == pytest.approx(x, rel=1e-9)


def test_default_jitter_matches_reported_spread():
    assert ServoParams().tau_jitter_sigma * LN20 == pytest.approx(2.3)


def test_params_validation():
    with pytest.raises(ValueError):
        ServoParams(time_constant=0)
    with pytest.raises(ValueError):
        ServoParams(steady_bias_sigma=-1)
