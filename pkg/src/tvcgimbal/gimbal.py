"""Two-axis gimbal linkage: servo shaft angles to nozzle deflection and thrust."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GimbalGeometry:
    amplification: float = 3.0  # servo deg per nozzle deg
    max_deflection: float = 5.0  # deg
    pivot_lever: float = 0.02  # m, pivot to thrust application point
    pivot_to_cg: float = 0.30  # m
    pin_diameter: float = 6.35  # mm
    inner_mount_diameter: float = 35.0  # mm
    outer_frame_diameter: float = 74.0  # mm

    def __post_init__(self):
        if not self.amplification >= 1:
            raise ValueError(f"amplification must be >= 1, got {self.amplification}")
        if not self.max_deflection > 0:
            raise ValueError(f"max_deflection must be > 0, got {self.max_deflection}")
        for name in ("pivot_lever", "pivot_to_cg", "pin_diameter",
                     "inner_mount_diameter", "outer_frame_diameter"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class NozzleDeflection:
    pitch: float = 0.0  # deg
    yaw: float = 0.0  # deg
    saturated_pitch: bool = False
    saturated_yaw: bool = False


def _clamp_axis(value: float, limit: float) -> tuple[float, bool]:
    if value > limit:
        return limit, True
    if value < -limit:
        return -limit, True
    return value, False


def servo_to_nozzle(shaft_pitch: float, shaft_yaw: float,
                    geom: GimbalGeometry = GimbalGeometry()) -> NozzleDeflection:
    pitch, sp = _clamp_axis(shaft_pitch / geom.amplification, geom.max_deflection)
    yaw, sy = _clamp_axis(shaft_yaw / geom.amplification, geom.max_deflection)
    return NozzleDeflection(pitch, yaw, sp, sy)


def nozzle_to_servo(deflection: NozzleDeflection,
                    geom: GimbalGeometry = GimbalGeometry()) -> tuple[float, float]:
    """Shaft angles that produce ``deflection``; raises if beyond authority."""
    for axis in ("pitch", "yaw"):
        value = getattr(deflection, axis)
        if abs(value) > geom.max_deflection:
            raise ValueError(
                f"{axis} deflection {value} deg exceeds +/-{geom.max_deflection} deg"
            )
    g = geom.amplification
    return g * deflection.pitch, g * deflection.yaw


def thrust_vector(deflection: NozzleDeflection, magnitude: float) -> np.ndarray:
    """Body-frame thrust for a deflected nozzle.

    Direction is R_yaw(yaw) R_pitch(pitch) applied to +Z, i.e.
    (sin y cos p, -sin p, cos y cos p).
    """
    if magnitude < 0:
        raise ValueError(f"thrust magnitude must be >= 0, got {magnitude}")
    p = math.radians(deflection.pitch)
    y = math.radians(deflection.yaw)
    cp = math.cos(p)
    u = np.array([math.sin(y) * cp, -math.sin(p), math.cos(y) * cp])
    return magnitude * u


def servo_torque_demand(thrust: float, deflection_axis_angle: float,
                        geom: GimbalGeometry = GimbalGeometry(),
                        friction_torque: float = 0.0) -> float:
    """Static shaft torque (N*m) needed to hold one axis at the given deflection."""
    if thrust < 0:
        raise ValueError(f"thrust must be >= 0, got {thrust}")
    lever_torque = thrust * math.sin(math.radians(deflection_axis_angle)) * geom.pivot_lever
    return lever_torque / geom.amplification + friction_torque
