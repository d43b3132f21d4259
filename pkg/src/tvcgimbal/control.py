"""PID attitude control and open-loop step profiles for the gimbal."""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import RigidBodyState, tilt_angles
from .gimbal import NozzleDeflection


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.4  # deg nozzle per deg tilt
    ki: float = 0.2  # 1/s
    kd: float = 0.08  # s
    integrator_limit: float = 2.0  # deg s
    output_limit: float = 5.0  # deg

    def __post_init__(self):
        if not self.output_limit > 0:
            raise ValueError(f"output_limit must be > 0, got {self.output_limit}")
        if self.integrator_limit < 0:
            raise ValueError(f"integrator_limit must be >= 0, got {self.integrator_limit}")


def pid_step(gains: PidGains, error: float, prev_error: float, integrator: float,
             dt: float) -> tuple[float, float]:
    """One PID update. Returns ``(output, new_integrator)``, both clamped."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    lim = gains.integrator_limit
    integrator = min(max(integrator + error * dt, -lim), lim)
    out = gains.kp * error + gains.ki * integrator + gains.kd * (error - prev_error) / dt
    olim = gains.output_limit
    return min(max(out, -olim), olim), integrator


class AttitudeController:
    """Two independent PID loops driving tilt toward vertical.

    A positive pitch (yaw) tilt calls for a positive pitch (yaw) nozzle
    deflection with this module's thrust and body-axis conventions.
    """

    def __init__(self, gains: PidGains = PidGains(), period: float = 0.02):
        self.gains = gains
        self.period = period
        self.integrator = [0.0, 0.0]
        self.prev_error: list[float] | None = None

    def update(self, t: float, state: RigidBodyState) -> NozzleDeflection:
        errors = tilt_angles(state.attitude)
        if self.prev_error is None:
            self.prev_error = list(errors)
        out = []
        for axis in (0, 1):
            u, self.integrator[axis] = pid_step(self.gains, errors[axis],
                                                self.prev_error[axis],
                                                self.integrator[axis], self.period)
            out.append(u)
        self.prev_error = list(errors)
        return NozzleDeflection(out[0], out[1])


@dataclass(frozen=True)
class CommandProfile:
    steps: tuple[tuple[float, float, float], ...] = ()  # (t s, pitch deg, yaw deg)
    max_deflection: float = 5.0

    def __post_init__(self):
        times = [s[0] for s in self.steps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("profile times must increase strictly")
        for t, p, y in self.steps:
            if abs(p) > self.max_deflection or abs(y) > self.max_deflection:
                raise ValueError(f"command ({p}, {y}) at t={t} exceeds authority")

    def at(self, t: float) -> tuple[float, float]:
        """Held command at time ``t``; neutral before the first step."""
        current = (0.0, 0.0)
        for ts, p, y in self.steps:
            if ts > t:
                break
            current = (p, y)
        return current

    def update(self, t: float, state=None) -> NozzleDeflection:
        p, y = self.at(t)
        return NozzleDeflection(p, y)


def step_profile(amplitude: float, period: float, cycles: int,
                 max_deflection: float = 5.0, axis: str = "pitch") -> CommandProfile:
    """Alternating +amplitude / -amplitude steps, one per half period."""
    if abs(amplitude) > max_deflection:
        raise ValueError(f"amplitude {amplitude} deg exceeds +/-{max_deflection} deg")
    if cycles < 0:
        raise ValueError(f"cycles must be >= 0, got {cycles}")
    steps = []
    for i in range(cycles):
        value = amplitude if i % 2 == 0 else -amplitude
        cmd = (value, 0.0) if axis == "pitch" else (0.0, value)
        steps.append((i * period / 2, *cmd))
    return CommandProfile(tuple(steps), max_deflection)
