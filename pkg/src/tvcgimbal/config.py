"""Scenario files: YAML mapping validated into nested dataclasses.

Every section is optional except where a mode needs it; omitted keys take
the dataclass defaults. Unknown keys are rejected with their file location.
See README.md for the full grammar.
"""

from __future__ import annotations

import dataclasses
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .bench import SamplerSpec
from .control import PidGains
from .dynamics import Disturbance, RocketParams
from .gimbal import GimbalGeometry
from .servo import ServoParams
from .structural import MATERIALS

MODES = ("bench", "fly", "stress", "calibrate")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ThrustSource:
    kind: str = "constant"  # constant | eng
    thrust: float = 30.0  # N
    burn_time: float = 6.0  # s
    eng_file: str | None = None


@dataclass(frozen=True)
class ControllerSpec:
    kind: str = "pid"  # pid | profile | none
    gains: PidGains = PidGains()
    amplitude: float = 5.0
    period: float = 1.0
    cycles: int = 0


@dataclass(frozen=True)
class BenchSpec:
    trials: int = 10
    amplitude: float = 5.0
    duration: float = 0.4  # s per trial
    workers: int = 1


@dataclass(frozen=True)
class FlySpec:
    t_end: float = 5.0
    dt: float = 0.001
    control_period: float = 0.02
    record_every: int = 10
    initial_pitch: float = 2.0  # deg
    initial_yaw: float = 0.0  # deg
    variable_mass: bool = False
    settle_after: float = 2.0  # s, start of the reported settled window
    disturbances: tuple[Disturbance, ...] = ()


@dataclass(frozen=True)
class StressSpec:
    axial_load: float = 30.0
    pin_diameter: float = 6.35
    shear_planes: int = 2
    load_share_pins: int = 1
    materials: tuple[str, ...] = ("ABS", "PLA", "PC")
    friction_torque: float = 0.0
    servo_stall: float = 0.176


@dataclass(frozen=True)
class CalibrateSpec:
    input: str | None = None


@dataclass(frozen=True)
class Envelopes:
    mean_response: tuple[float, float] | None = None
    std_response: tuple[float, float] | None = None
    max_mean_abs_error: float | None = None
    max_failures: int | None = None


@dataclass(frozen=True)
class Outputs:
    csv: str | None = None
    summary: str | None = None


@dataclass(frozen=True)
class Scenario:
    mode: str | None = None
    seed: int | None = None
    servo: ServoParams = ServoParams()
    gimbal: GimbalGeometry = GimbalGeometry()
    rocket: RocketParams = RocketParams()
    thrust: ThrustSource = ThrustSource()
    controller: ControllerSpec = ControllerSpec()
    sampler: SamplerSpec = SamplerSpec()
    bench: BenchSpec = BenchSpec()
    fly: FlySpec = FlySpec()
    stress: StressSpec = StressSpec()
    calibrate: CalibrateSpec = CalibrateSpec()
    envelopes: Envelopes = Envelopes()
    outputs: Outputs = Outputs()
    source: str = field(default="<string>", compare=False)

    def resolve_input(self, path: str) -> Path:
        """Input paths are relative to the directory of the config file."""
        p = Path(path)
        return p if p.is_absolute() else Path(self.source).parent / p


# rocket.pivot_to_cg always follows gimbal.pivot_to_cg
_EXCLUDED = {RocketParams: {"pivot_to_cg"}, Scenario: {"source"}}


def _key_lines(node, prefix=(), out=None) -> dict[tuple, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = prefix + (k.value,)
            out[path] = k.start_mark.line + 1
            _key_lines(v, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out[prefix + (i,)] = v.start_mark.line + 1
            _key_lines(v, prefix + (i,), out)
    return out


class _Builder:
    def __init__(self, source: str, lines: dict[tuple, int]):
        self.source = source
        self.lines = lines

    def where(self, path: tuple) -> str:
        key = ".".join(str(p) for p in path) or "<root>"
        for n in range(len(path), 0, -1):
            if path[:n] in self.lines:
                return f"{self.source}:{self.lines[path[:n]]}: {key}"
        return f"{self.source}: {key}"

    def fail(self, path, msg):
        raise ConfigError(f"{self.where(path)}: {msg}")

    def build(self, cls, data, path=()):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            self.fail(path, f"expected a mapping, got {type(data).__name__}")
        hints = typing.get_type_hints(cls)
        names = [f.name for f in dataclasses.fields(cls)
                 if f.init and f.name not in _EXCLUDED.get(cls, ())]
        unknown = sorted(str(k) for k in data if k not in names)
        if unknown:
            self.fail(path, f"unknown key(s): {', '.join(unknown)}")
        kwargs = {k: self.value(hints[k], data[k], path + (k,)) for k in data}
        try:
            return cls(**kwargs)
        except (ValueError, TypeError) as exc:
            self.fail(path, str(exc))

    def value(self, tp, v, path):
        origin = typing.get_origin(tp)
        args = typing.get_args(tp)
        if origin in (typing.Union, types.UnionType):
            if v is None and type(None) in args:
                return None
            inner = [a for a in args if a is not type(None)]
            return self.value(inner[0], v, path)
        if dataclasses.is_dataclass(tp):
            return self.build(tp, v, path)
        if origin is tuple:
            if not isinstance(v, list):
                self.fail(path, f"expected a list, got {v!r}")
            if len(args) == 2 and args[1] is Ellipsis:
                return tuple(self.value(args[0], x, path + (i,)) for i, x in enumerate(v))
            if len(v) != len(args):
                self.fail(path, f"expected {len(args)} values, got {len(v)}")
            return tuple(self.value(a, x, path + (i,)) for i, (a, x) in enumerate(zip(args, v)))
        if tp is bool:
            if not isinstance(v, bool):
                self.fail(path, f"expected true/false, got {v!r}")
            return v
        if tp is int:
            if isinstance(v, bool) or not isinstance(v, int):
                self.fail(path, f"expected an integer, got {v!r}")
            return v
        if tp is float:
            if isinstance(v, str):
                # PyYAML reads exponents without a sign (1.0e3) as strings
                try:
                    return float(v)
                except ValueError:
                    pass
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                self.fail(path, f"expected a number, got {v!r}")
            return float(v)
        if tp is str:
            if not isinstance(v, str):
                self.fail(path, f"expected a string, got {v!r}")
            return v
        raise TypeError(f"unsupported config type {tp}")  # pragma: no cover


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            data = loader.construct_document(node) if node is not None else {}
        finally:
            loader.dispose()
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: invalid YAML: {exc}") from None
    b = _Builder(source, _key_lines(node) if node is not None else {})
    scenario = b.build(Scenario, data)
    if scenario.mode is not None and scenario.mode not in MODES:
        b.fail(("mode",), f"must be one of {', '.join(MODES)}, got {scenario.mode!r}")
    if scenario.seed is not None and not 0 <= scenario.seed < 2**64:
        b.fail(("seed",), "must be an unsigned 64-bit integer")
    if scenario.thrust.kind not in ("constant", "eng"):
        b.fail(("thrust", "kind"), f"must be 'constant' or 'eng', got {scenario.thrust.kind!r}")
    if scenario.thrust.kind == "eng" and not scenario.thrust.eng_file:
        b.fail(("thrust", "eng_file"), "required when thrust.kind is 'eng'")
    if scenario.controller.kind not in ("pid", "profile", "none"):
        b.fail(("controller", "kind"), f"must be pid, profile or none, got {scenario.controller.kind!r}")
    unknown = [m for m in scenario.stress.materials if m not in MATERIALS]
    if unknown:
        b.fail(("stress", "materials"), f"unknown material(s): {', '.join(unknown)}")
    if scenario.bench.trials < 1:
        b.fail(("bench", "trials"), "must be >= 1")
    rocket = dataclasses.replace(scenario.rocket, pivot_to_cg=scenario.gimbal.pivot_to_cg)
    return dataclasses.replace(scenario, rocket=rocket, source=source)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_scenario(text, str(path))


def require(scenario: Scenario, key: str, value):
    if value is None:
        raise ConfigError(
            f"{scenario.source}: missing required key '{key}' for mode {scenario.mode}")
    return value


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        out = {}
        for f in dataclasses.fields(obj):
            if not f.init or f.name in _EXCLUDED.get(type(obj), ()):
                continue
            out[f.name] = _plain(getattr(obj, f.name))
        return out
    if isinstance(obj, tuple):
        return [_plain(x) for x in obj]
    return obj


def dump_scenario(scenario: Scenario) -> str:
    """Fully resolved YAML that parses back to an equal scenario."""
    return yaml.safe_dump(_plain(scenario), sort_keys=False, default_flow_style=None)
