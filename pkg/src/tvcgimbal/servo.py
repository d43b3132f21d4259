"""Micro-servo channel model: PWM mapping and first-order lag with rate limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

LN20 = math.log(20.0)


@dataclass(frozen=True)
class ServoParams:
    """First-order-lag servo parameters.

    Angles are shaft degrees except the steady bias, which is referred to the
    gimbal output (nozzle degrees) because it is fitted to measured deflections.
    """

    time_constant: float = 44.5 / LN20  # ms
    rate_limit: float = 2000.0  # deg/s
    max_travel: float = 90.0  # deg
    steady_bias_mean: float = 0.02  # deg, output-referred
    steady_bias_sigma: float = 0.1135  # deg, output-referred
    tau_jitter_sigma: float = 2.3 / LN20  # ms

    def __post_init__(self):
        if not self.time_constant > 0:
            raise ValueError(f"time_constant must be > 0, got {self.time_constant}")
        if not self.rate_limit > 0:
            raise ValueError(f"rate_limit must be > 0, got {self.rate_limit}")
        if not self.max_travel > 0:
            raise ValueError(f"max_travel must be > 0, got {self.max_travel}")
        if self.steady_bias_sigma < 0 or self.tau_jitter_sigma < 0:
            raise ValueError("sigmas must be >= 0")


@dataclass(frozen=True)
class ServoState:
    shaft_angle: float = 0.0  # deg
    commanded_angle: float = 0.0  # deg
    trial_bias: float = 0.0  # deg, shaft frame
    trial_tau: float = 44.5 / LN20  # ms

    def command(self, angle: float, params: ServoParams) -> ServoState:
        """Return a copy with a new command, clamped to the travel limits."""
        lim = params.max_travel
        return replace(self, commanded_angle=min(max(angle, -lim), lim))


@dataclass(frozen=True)
class PwmConvention:
    center_pulse: float = 1500.0  # us
    slope: float = 10.0  # us/deg
    min_pulse: float = 500.0
    max_pulse: float = 2500.0
    quantum: float = 1.0

    def __post_init__(self):
        if not self.min_pulse < self.center_pulse < self.max_pulse:
            raise ValueError("need min_pulse < center_pulse < max_pulse")
        if not self.slope > 0:
            raise ValueError(f"slope must be > 0, got {self.slope}")
        if not self.quantum > 0:
            raise ValueError(f"quantum must be > 0, got {self.quantum}")


def pwm_encode(angle: float, conv: PwmConvention = PwmConvention()) -> tuple[float, bool]:
    """Map a shaft angle to a pulse width.

    Returns ``(pulse_us, saturated)``; out-of-range angles clamp to the pulse
    limits with ``saturated`` set.
    """
    raw = conv.center_pulse + conv.slope * angle
    saturated = raw < conv.min_pulse or raw > conv.max_pulse
    clamped = min(max(raw, conv.min_pulse), conv.max_pulse)
    pulse = round(clamped / conv.quantum) * conv.quantum
    # rounding must not step back outside the clamp range
    pulse = min(max(pulse, conv.min_pulse), conv.max_pulse)
    return pulse, saturated


def pwm_decode(pulse: float, conv: PwmConvention = PwmConvention()) -> float:
    if not conv.min_pulse <= pulse <= conv.max_pulse:
        raise ValueError(
            f"pulse {pulse} us outside [{conv.min_pulse}, {conv.max_pulse}] us"
        )
    return (pulse - conv.center_pulse) / conv.slope


def servo_step(state: ServoState, dt: float, params: ServoParams) -> ServoState:
    """Advance the shaft by ``dt`` milliseconds.

    Exact exponential relaxation toward ``commanded_angle + trial_bias``, with
    the increment limited to ``rate_limit * dt`` and the result kept inside
    the travel limits.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    target = state.commanded_angle + state.trial_bias
    relaxed = target + (state.shaft_angle - target) * math.exp(-dt / state.trial_tau)
    max_inc = params.rate_limit * dt * 1e-3
    inc = min(max(relaxed - state.shaft_angle, -max_inc), max_inc)
    lim = params.max_travel
    theta = min(max(state.shaft_angle + inc, -lim), lim)
    return replace(state, shaft_angle=theta)


def calibrate_time_constant(t95: float) -> float:
    """Time constant (ms) of a first-order lag whose 95 % rise time is ``t95``."""
    if not t95 > 0:
        raise ValueError(f"rise time must be > 0, got {t95}")
    return t95 / LN20


def analytic_rise_time(tau: float) -> float:
    if not tau > 0:
        raise ValueError(f"time constant must be > 0, got {tau}")
    return tau * LN20
