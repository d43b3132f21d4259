"""Thrust curves: constant nominal load or RASP ``.eng`` motor files.

Serialized ``.eng`` layout (byte-stable)::

    ; optional comment lines
    NAME DIAMETER LENGTH DELAYS PROPELLANT_KG TOTAL_KG MANUFACTURER
    TIME THRUST
    ...

Numbers are written with ``repr``-style shortest round-trip formatting, one
space between fields and a trailing newline. Diameter and length are in mm.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field


class EngParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class ThrustCurve:
    name: str
    diameter: float  # mm
    samples: tuple[tuple[float, float], ...]  # (s, N)
    propellant_mass: float = 0.0  # kg
    total_mass: float = 0.0  # kg
    length: float = 0.0  # mm
    delays: str = "0"
    manufacturer: str = "unknown"
    _times: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.samples:
            raise ValueError("thrust curve needs at least one sample")
        times = tuple(float(t) for t, _ in self.samples)
        for a, b in zip(times, times[1:]):
            if not b > a:
                raise ValueError(f"sample times must increase strictly ({a} then {b})")
        if any(f < 0 for _, f in self.samples):
            raise ValueError("thrust samples must be >= 0")
        object.__setattr__(self, "_times", times)

    @property
    def burn_time(self) -> float:
        return self._times[-1]


def constant_curve(thrust: float, burn_time: float) -> ThrustCurve:
    if thrust < 0:
        raise ValueError(f"thrust must be >= 0, got {thrust}")
    if not burn_time > 0:
        raise ValueError(f"burn_time must be > 0, got {burn_time}")
    return ThrustCurve("constant", 0.0, ((0.0, thrust), (burn_time, thrust)))


def thrust_at(curve: ThrustCurve, t: float) -> float:
    """Linearly interpolated thrust; zero after the last sample."""
    times = curve._times
    if t > times[-1]:
        return 0.0
    i = bisect.bisect_right(times, t)
    if i == 0:
        return 0.0
    t0, f0 = curve.samples[i - 1]
    if i == len(times):
        return f0
    t1, f1 = curve.samples[i]
    return f0 + (f1 - f0) * (t - t0) / (t1 - t0)


def total_impulse(curve: ThrustCurve) -> float:
    s = curve.samples
    return sum(0.5 * (f0 + f1) * (t1 - t0) for (t0, f0), (t1, f1) in zip(s, s[1:]))


def mass_at(curve: ThrustCurve, t: float, dry_mass: float) -> float:
    """Vehicle mass with propellant burned in proportion to delivered impulse."""
    if curve.propellant_mass <= 0:
        return dry_mass + curve.total_mass
    total = total_impulse(curve)
    if total <= 0:
        return dry_mass + curve.total_mass
    delivered = _impulse_until(curve, t)
    return dry_mass + curve.total_mass - curve.propellant_mass * min(delivered / total, 1.0)


def _impulse_until(curve: ThrustCurve, t: float) -> float:
    acc = 0.0
    s = curve.samples
    for (t0, f0), (t1, f1) in zip(s, s[1:]):
        if t <= t0:
            break
        if t >= t1:
            acc += 0.5 * (f0 + f1) * (t1 - t0)
        else:
            ft = f0 + (f1 - f0) * (t - t0) / (t1 - t0)
            acc += 0.5 * (f0 + ft) * (t - t0)
            break
    return acc


def parse_eng(text: bytes | str) -> ThrustCurve:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    header = None
    samples: list[tuple[float, float]] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        last_line = lineno
        parts = line.split()
        if header is None:
            if len(parts) < 7:
                raise EngParseError(lineno, f"header needs 7 fields, got {len(parts)}")
            try:
                diameter, length = float(parts[1]), float(parts[2])
                prop, total = float(parts[4]), float(parts[5])
            except ValueError as exc:
                raise EngParseError(lineno, f"malformed header: {exc}") from None
            header = (parts[0], diameter, length, parts[3], prop, total, " ".join(parts[6:]))
            continue
        if len(parts) != 2:
            raise EngParseError(lineno, f"expected 'time thrust', got {line!r}")
        try:
            t, f = float(parts[0]), float(parts[1])
        except ValueError:
            raise EngParseError(lineno, f"non-numeric sample {line!r}") from None
        if f < 0:
            raise EngParseError(lineno, f"negative thrust {f}")
        if samples and not t > samples[-1][0]:
            raise EngParseError(lineno, f"time {t} not after {samples[-1][0]}")
        if not samples and t < 0:
            raise EngParseError(lineno, f"negative time {t}")
        samples.append((t, f))
    if header is None:
        raise EngParseError(last_line + 1, "missing header")
    if not samples:
        raise EngParseError(last_line + 1, "no thrust samples")
    if samples[-1][1] != 0:
        raise EngParseError(last_line, "final sample must have zero thrust")
    if samples[0][0] > 0:
        samples.insert(0, (0.0, 0.0))
    name, diameter, length, delays, prop, total, maker = header
    return ThrustCurve(name, diameter, tuple(samples), prop, total, length, delays, maker)


def serialize_eng(curve: ThrustCurve) -> str:
    """Write ``curve`` in RASP format; ``parse_eng`` restores every field."""
    head = [curve.name, repr(float(curve.diameter)), repr(float(curve.length)),
            curve.delays, repr(float(curve.propellant_mass)),
            repr(float(curve.total_mass)), curve.manufacturer]
    lines = [" ".join(head)]
    lines += [f"{float(t)!r} {float(f)!r}" for t, f in curve.samples]
    return "\n".join(lines) + "\n"
