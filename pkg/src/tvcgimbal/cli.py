"""Command-line entry point: ``tvcgimbal {bench,fly,stress,calibrate,run} CONFIG``."""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from . import report
from .bench import aggregate_stats, run_trial_batch
from .config import ConfigError, Scenario, dump_scenario, load_scenario, require
from .control import AttitudeController, step_profile
from .dynamics import RigidBodyState, SimulationDiverged, quat_from_axis_angle, quat_multiply, simulate, tilt_angles
from .gimbal import servo_torque_demand
from .propulsion import EngParseError, constant_curve, parse_eng, total_impulse
from .servo import LN20
from .structural import MATERIALS, PinLoadCase, pin_stress_report, torque_margin

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


class OutputError(OSError):
    pass


def _check_range(name, value, bounds):
    lo, hi = bounds
    ok = lo <= value <= hi
    return f"  [{'PASS' if ok else 'FAIL'}] {name} {value:.3f} in [{lo}, {hi}]"


def run_bench(sc: Scenario, workers: int | None = None):
    seed = require(sc, "seed", sc.seed)
    records = run_trial_batch(sc.bench.trials, sc.servo, sc.gimbal, sc.sampler, seed,
                              workers=workers or sc.bench.workers,
                              amplitude=sc.bench.amplitude, duration=sc.bench.duration)
    stats = aggregate_stats(records) if sc.bench.trials >= 2 else None
    csv_text = report.render_csv(report.BENCH_COLUMNS, report.bench_rows(records),
                                 report.stats_footer(stats))
    lines = [f"bench: {sc.bench.trials} trials, +/-{sc.bench.amplitude} deg steps, "
             f"{sc.sampler.frame_rate:g} fps, seed {seed}"]
    if stats:
        lines += [f"  mean response      {stats.mean_response:8.3f} ms",
                  f"  std response (n-1) {stats.std_response:8.3f} ms",
                  f"  mean |error|       {stats.mean_abs_error:8.4f} deg",
                  f"  signed error std   {stats.std_signed_error:8.4f} deg",
                  f"  failures (>1 deg)  {stats.failure_count:8d}"]
        env = sc.envelopes
        if env.mean_response:
            lines.append(_check_range("mean_response_ms", stats.mean_response, env.mean_response))
        if env.std_response:
            lines.append(_check_range("std_response_ms", stats.std_response, env.std_response))
        if env.max_mean_abs_error is not None:
            ok = stats.mean_abs_error <= env.max_mean_abs_error
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] mean_abs_error_deg "
                         f"{stats.mean_abs_error:.4f} <= {env.max_mean_abs_error}")
        if env.max_failures is not None:
            ok = stats.failure_count <= env.max_failures
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] failures {stats.failure_count} "
                         f"<= {env.max_failures}")
    return csv_text, "\n".join(lines)


def load_curve(sc: Scenario):
    if sc.thrust.kind == "constant":
        return constant_curve(sc.thrust.thrust, sc.thrust.burn_time)
    path = sc.resolve_input(sc.thrust.eng_file)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror}") from None
    try:
        return parse_eng(data)
    except EngParseError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def run_fly(sc: Scenario):
    curve = load_curve(sc)
    f = sc.fly
    q = quat_multiply(quat_from_axis_angle((1, 0, 0), math.radians(f.initial_pitch)),
                      quat_from_axis_angle((0, 1, 0), math.radians(f.initial_yaw)))
    initial = RigidBodyState(attitude=q)
    c = sc.controller
    if c.kind == "pid":
        gains = dataclasses.replace(c.gains, output_limit=min(c.gains.output_limit,
                                                              sc.gimbal.max_deflection))
        controller = AttitudeController(gains, f.control_period)
    elif c.kind == "profile":
        controller = step_profile(c.amplitude, c.period, c.cycles, sc.gimbal.max_deflection)
    else:
        controller = None
    records = simulate(initial, sc.rocket, curve, controller, f.disturbances, f.t_end, f.dt,
                       control_period=f.control_period, record_every=f.record_every,
                       geom=sc.gimbal, servo=sc.servo, variable_mass=f.variable_mass)
    tilts = [(r[0], *tilt_angles(r[7:11])) for r in records]
    late = [max(abs(p), abs(y)) for t, p, y in tilts if t > f.settle_after]
    peak_nozzle = max(max(abs(r[16]), abs(r[17])) for r in records)
    peak_thrust = max(r[18] for r in records)
    demand = servo_torque_demand(peak_thrust, peak_nozzle, sc.gimbal)
    margin = torque_margin(demand, sc.stress.servo_stall)
    lines = [f"fly: {f.t_end:g} s at dt={f.dt:g} s, control every {f.control_period:g} s, "
             f"controller={c.kind}, thrust impulse {total_impulse(curve):.2f} N s",
             f"  initial tilt        pitch {f.initial_pitch:g} deg, yaw {f.initial_yaw:g} deg",
             f"  max |tilt|          {max(max(abs(p), abs(y)) for _, p, y in tilts):.4f} deg",
             f"  max |tilt| t>{f.settle_after:g}s   "
             + (f"{max(late):.4f} deg" if late else "n/a"),
             f"  final altitude      {records[-1][3]:.2f} m",
             f"  peak nozzle         {peak_nozzle:.3f} deg",
             f"  servo torque margin "
             + ("inf" if math.isinf(margin.ratio) else f"{margin.ratio:.2f}")
             + (" (NO MARGIN)" if margin.no_margin else "")]
    return report.fly_csv(records), "\n".join(lines)


def run_stress(sc: Scenario):
    s = sc.stress
    case = PinLoadCase(s.axial_load, s.pin_diameter, s.shear_planes, s.load_share_pins)
    rows = []
    lines = [f"stress: {s.axial_load:g} N on {s.load_share_pins} pin(s), "
             f"d={s.pin_diameter:g} mm, {s.shear_planes} shear plane(s)"]
    for name in s.materials:
        mat = MATERIALS[name]
        rep = pin_stress_report(case, mat)
        rows.append((name, report.fmt(rep.shear, 6), report.fmt(rep.von_mises, 6),
                     report.fmt(rep.safety_factor, 3)))
        lines.append(f"  {name:<4} shear {rep.shear:.4f} MPa  von Mises {rep.von_mises:.4f} MPa"
                     f"  yield {mat.yield_strength:g} MPa  SF {rep.safety_factor:.1f}")
    demand = servo_torque_demand(s.axial_load, sc.gimbal.max_deflection, sc.gimbal,
                                 s.friction_torque)
    margin = torque_margin(demand, s.servo_stall)
    lines.append(f"  servo torque at {sc.gimbal.max_deflection:g} deg: {demand:.5f} N m, "
                 f"stall {s.servo_stall:g} N m, margin "
                 + ("inf" if math.isinf(margin.ratio) else f"{margin.ratio:.2f}")
                 + (" (NO MARGIN)" if margin.no_margin else ""))
    return report.render_csv(report.STRESS_COLUMNS, rows), "\n".join(lines)


def run_calibrate(sc: Scenario):
    src = sc.resolve_input(require(sc, "calibrate.input", sc.calibrate.input))
    try:
        records = report.read_bench_csv(src)
    except OSError as exc:
        raise OutputError(f"{src}: {exc.strerror}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    stats = aggregate_stats(records)
    tau = stats.mean_response / LN20
    jitter = stats.std_response / LN20
    row = (stats.n_trials, report.fmt(stats.mean_response, 4), report.fmt(stats.std_response, 4),
           report.fmt(tau, 4), report.fmt(jitter, 4), report.fmt(stats.mean_signed_error, 4),
           report.fmt(stats.std_signed_error, 4))
    lines = [f"calibrate: {stats.n_trials} trials from {src}",
             f"  time_constant       {tau:.4f} ms   (t95 {stats.mean_response:.3f} ms / ln 20)",
             f"  tau_jitter_sigma    {jitter:.4f} ms   (std {stats.std_response:.3f} ms / ln 20)",
             f"  steady_bias_mean    {stats.mean_signed_error:.4f} deg",
             f"  steady_bias_sigma   {stats.std_signed_error:.4f} deg"]
    return report.render_csv(report.CALIBRATION_COLUMNS, [row]), "\n".join(lines)


RUNNERS = {"bench": run_bench, "fly": run_fly, "stress": run_stress, "calibrate": run_calibrate}


def run_scenario(config: str | Path, mode: str | None = None, seed: int | None = None,
                 out_dir: str | Path | None = None, workers: int | None = None,
                 stdout=None) -> int:
    """Run one scenario file and return the process exit status."""
    out = stdout or sys.stdout
    try:
        sc = load_scenario(config)
        if mode and sc.mode and sc.mode != mode:
            raise ConfigError(f"{config}: mode: file says {sc.mode!r}, command says {mode!r}")
        sc = dataclasses.replace(sc, mode=mode or sc.mode,
                                 seed=sc.seed if seed is None else seed)
        if sc.mode is None:
            raise ConfigError(f"{config}: missing required key 'mode'")
        if sc.seed is not None and not 0 <= sc.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        kwargs = {"workers": workers} if sc.mode == "bench" else {}
        csv_text, summary = RUNNERS[sc.mode](sc, **kwargs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationDiverged as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    base = Path(out_dir) if out_dir is not None else Path(".")
    try:
        if sc.outputs.csv or sc.outputs.summary:
            base.mkdir(parents=True, exist_ok=True)
        if sc.outputs.csv:
            (base / sc.outputs.csv).write_text(csv_text)
        if sc.outputs.summary:
            (base / sc.outputs.summary).write_text(summary + "\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(summary, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvcgimbal",
                                     description="TVC gimbal simulation and checks")
    parser.add_argument("command", choices=["bench", "fly", "stress", "calibrate", "run"],
                        help="'run' uses the mode named in the config file")
    parser.add_argument("config", help="scenario YAML file")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--out-dir", help="directory for output files (default: cwd)")
    parser.add_argument("--workers", type=int, help="parallel bench workers")
    parser.add_argument("--print-config", action="store_true",
                        help="print the resolved scenario as YAML and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    mode = None if args.command == "run" else args.command
    if args.print_config:
        try:
            sc = load_scenario(args.config)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        sc = dataclasses.replace(sc, mode=mode or sc.mode,
                                 seed=sc.seed if args.seed is None else args.seed)
        sys.stdout.write(dump_scenario(sc))
        return EXIT_OK
    return run_scenario(args.config, mode, args.seed, args.out_dir, args.workers)


if __name__ == "__main__":
    sys.exit(main())
