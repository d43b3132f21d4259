"""Closed-form pin-joint stress and servo torque-margin checks."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    density: float  # g/cm^3
    yield_strength: float  # MPa

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError(f"density must be > 0, got {self.density}")
        if not self.yield_strength > 0:
            raise ValueError(f"yield_strength must be > 0, got {self.yield_strength}")


# Densities are the measured print materials; yield strengths are generic
# handbook values for printed parts and should be replaced with test data.
MATERIALS = {
    "ABS": MaterialSpec("ABS", 1.04, 40.0),
    "PLA": MaterialSpec("PLA", 1.245, 60.0),
    "PC": MaterialSpec("PC", 1.20, 62.0),
}

SG90_STALL_TORQUE = 0.176  # N m (1.8 kg cm at 4.8 V, vendor datasheet)


@dataclass(frozen=True)
class PinLoadCase:
    axial_load: float = 30.0  # N
    pin_diameter: float = 6.35  # mm
    shear_planes: int = 2
    load_share_pins: int = 1

    def __post_init__(self):
        if not self.axial_load > 0 or not self.pin_diameter > 0:
            raise ValueError("axial_load and pin_diameter must be > 0")
        if self.shear_planes not in (1, 2):
            raise ValueError(f"shear_planes must be 1 or 2, got {self.shear_planes}")
        if self.load_share_pins < 1:
            raise ValueError(f"load_share_pins must be >= 1, got {self.load_share_pins}")


@dataclass(frozen=True)
class PinStressReport:
    shear: float  # MPa
    von_mises: float  # MPa
    safety_factor: float


def pin_stress_report(case: PinLoadCase, material: MaterialSpec) -> PinStressReport:
    """Average shear per plane, its von Mises equivalent and yield margin."""
    area = math.pi * (case.pin_diameter / 2.0) ** 2  # mm^2, so N/mm^2 = MPa
    shear = case.axial_load / (case.load_share_pins * case.shear_planes * area)
    vm = math.sqrt(3.0) * shear
    return PinStressReport(shear, vm, material.yield_strength / vm)


@dataclass(frozen=True)
class TorqueMargin:
    ratio: float  # math.inf when nothing is demanded
    no_margin: bool


def torque_margin(demand: float, servo_stall: float = SG90_STALL_TORQUE) -> TorqueMargin:
    if demand < 0:
        raise ValueError(f"demand must be >= 0, got {demand}")
    if not servo_stall > 0:
        raise ValueError(f"servo_stall must be > 0, got {servo_stall}")
    if demand == 0:
        return TorqueMargin(math.inf, False)
    ratio = servo_stall / demand
    return TorqueMargin(ratio, ratio <= 1.0)
