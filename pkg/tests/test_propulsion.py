import numpy as np
import pytest
from hypothesis import given, strategies as st

from tvcgimbal.propulsion import (
    EngParseError, ThrustCurve, constant_curve, mass_at, parse_eng, serialize_eng,
    thrust_at, total_impulse,
)

FIXTURE = b"""; synthetic fixture
F15 29 114 0 0.060 0.102 Estes
0.1 25
0.2 30
3.0 0
"""


def test_constant_curve():
    c = constant_curve(30.0, 3.0)
    assert thrust_at(c, 1.5) == 30.0
    assert thrust_at(c, 3.0) == 30.0
    assert thrust_at(c, 3.0001) == 0.0
    assert total_impulse(c) == pytest.approx(90.0)
    zero = constant_curve(0.0, 1.0)
    assert all(thrust_at(zero, t) == 0 for t in np.linspace(0, 2, 21))
    with pytest.raises(ValueError):
        constant_curve(30.0, 0.0)


def test_parse_fixture():
    c = parse_eng(FIXTURE)
    assert c.name == "F15" and c.diameter == 29.0 and c.length == 114.0
    assert c.propellant_mass == 0.060 and c.total_mass == 0.102
    assert c.manufacturer == "Estes"
    assert c.samples == ((0.0, 0.0), (0.1, 25.0), (0.2, 30.0), (3.0, 0.0))


def test_parse_non_monotonic_reports_line():
    text = b"F15 29 114 0 0.06 0.1 Estes\n0.2 10\n0.1 5\n0.5 0\n"
    with pytest.raises(EngParseError) as err:
        parse_eng(text)
    assert err.value.line == 3


@pytest.mark.parametrize("text,line", [
    (b"F15 29 114 0 0.06 0.1 Estes\n", 2),
    (b"F15 29 114\n0.1 5\n", 1),
    (b"F15 29 114 0 0.06 0.1 Estes\n0.1 5\n0.2 -1\n0.3 0\n", 3),
    (b"F15 29 114 0 0.06 0.1 Estes\n0.1 5\n0.2 4\n", 3),
    (b"F15 29 114 0 x 0.1 Estes\n0.1 0\n", 1),
])
def test_parse_errors(text, line):
    with pytest.raises(EngParseError) as err:
        parse_eng(text)
    assert err.value.line == line


def test_thrust_at_interpolation():
    c = ThrustCurve("t", 29, ((0, 0), (0.1, 25), (0.2, 30)))
    assert thrust_at(c, 0.15) == pytest.approx(27.5)
    assert thrust_at(c, 0.1) == 25
    assert thrust_at(c, 5.0) == 0


def test_thrust_continuity():
    c = parse_eng(FIXTURE)
    eps = 1e-9
    for t, f in c.samples:
        assert thrust_at(c, t) == f
        if t > 0:
            assert thrust_at(c, t - eps) == pytest.approx(f, abs=1e-6)
        assert thrust_at(c, t + eps) == pytest.approx(f, abs=1e-6)


def test_total_impulse_examples():
    assert total_impulse(ThrustCurve("r", 0, ((0, 0), (1, 30)))) == pytest.approx(15.0)
    assert total_impulse(ThrustCurve("z", 0, ((0, 0), (1, 0)))) == 0


def test_total_impulse_matches_riemann_sum():
    c = parse_eng(FIXTURE)
    h = 1e-4
    ts = (np.arange(int(3.0 / h)) + 0.5) * h
    riemann = h * sum(thrust_at(c, float(t)) for t in ts)
    assert total_impulse(c) == pytest.approx(riemann, rel=1e-6)


def test_serialize_round_trip_fixture():
    c = parse_eng(FIXTURE)
    text = serialize_eng(c)
    assert parse_eng(text) == c
    assert serialize_eng(parse_eng(text)) == text


@given(st.lists(st.tuples(st.floats(1e-3, 10), st.floats(0, 200)), min_size=1, max_size=20),
       st.floats(1, 100), st.floats(0, 1), st.floats(0, 2))
def test_serialize_round_trip_property(pairs, diameter, prop, total):
    times = sorted({round(t, 6) for t, _ in pairs})
    samples = [(t, f) for t, (_, f) in zip(times, pairs)]
    samples.append((times[-1] + 0.5, 0.0))
    c = ThrustCurve("X1", diameter, tuple(samples), prop, total, 100.0, "0-5", "Test")
    again = parse_eng(serialize_eng(c).encode())
    # the parser adds an origin for curves that start after t=0
    assert again.samples[-len(samples):] == c.samples
    assert (again.name, again.diameter, again.propellant_mass, again.total_mass,
            again.length, again.delays, again.manufacturer) == (
        c.name, c.diameter, c.propellant_mass, c.total_mass, c.length, c.delays,
        c.manufacturer)


def test_mass_burn():
    c = parse_eng(FIXTURE)
    assert mass_at(c, 0.0, 0.5) == pytest.approx(0.602)
    assert mass_at(c, 10.0, 0.5) == pytest.approx(0.542)
