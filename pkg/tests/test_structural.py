import math

import pytest

from tvcgimbal.structural import (
    MATERIALS, MaterialSpec, PinLoadCase, pin_stress_report, torque_margin,
)

ABS = MATERIALS["ABS"]


def test_paper_case():
    rep = pin_stress_report(PinLoadCase(30.0, 6.35, 2, 1), ABS)
    area = math.pi * 3.175 ** 2
    assert rep.shear == pytest.approx(30 / (2 * area), rel=1e-14)
    assert rep.von_mises == pytest.approx(math.sqrt(3) * 30 / (2 * area), rel=1e-14)
    assert f"{rep.von_mises:.4g}" == "0.8204"
    assert rep.safety_factor == pytest.approx(48.8, abs=0.05)


def test_doubling_load_halves_safety_factor():
    a = pin_stress_report(PinLoadCase(30.0), ABS)
    b = pin_stress_report(PinLoadCase(60.0), ABS)
    assert b.safety_factor == pytest.approx(a.safety_factor / 2, rel=1e-14)


@pytest.mark.parametrize("load", [1.0, 10.0, 30.0, 250.0])
@pytest.mark.parametrize("d", [2.0, 4.0, 6.35, 10.0])
@pytest.mark.parametrize("planes", [1, 2])
def test_scaling_sweep(load, d, planes):
    base = pin_stress_report(PinLoadCase(30.0, 6.35, planes), ABS)
    rep = pin_stress_report(PinLoadCase(load, d, planes), ABS)
    assert rep.shear == pytest.approx(base.shear * (load / 30.0) * (6.35 / d) ** 2, rel=1e-12)
    assert rep.von_mises == pytest.approx(math.sqrt(3) * rep.shear, rel=1e-12)


def test_single_shear_doubles_stress():
    one = pin_stress_report(PinLoadCase(30.0, shear_planes=1), ABS)
    two = pin_stress_report(PinLoadCase(30.0, shear_planes=2), ABS)
    assert one.shear == pytest.approx(2 * two.shear)


def test_every_preset_survives_nominal_load():
    for mat in MATERIALS.values():
        assert pin_stress_report(PinLoadCase(), mat).safety_factor > 1


def test_material_densities():
    assert MATERIALS["ABS"].density == 1.04
    assert 1.24 <= MATERIALS["PLA"].density <= 1.25


def test_torque_margin():
    assert torque_margin(0.01743, 0.176).ratio == pytest.approx(10.1, abs=0.01)
    zero = torque_margin(0.0, 0.176)
    assert math.isinf(zero.ratio) and not zero.no_margin
    edge = torque_margin(0.176, 0.176)
    assert edge.ratio == 1.0 and edge.no_margin


def test_validation():
    with pytest.raises(ValueError):
        PinLoadCase(shear_planes=3)
    with pytest.raises(ValueError):
        MaterialSpec("x", 0, 10)
    with pytest.raises(ValueError):
        torque_margin(-1, 1)
