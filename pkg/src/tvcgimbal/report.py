"""CSV writers and readers with locale-free fixed formatting."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .bench import TrialRecord, TrialStats
from .dynamics import FLY_COLUMNS

BENCH_COLUMNS = ("trial", "commanded_deg", "measured_deg", "response_ms", "failed")
STRESS_COLUMNS = ("material", "shear_mpa", "von_mises_mpa", "safety_factor")
CALIBRATION_COLUMNS = ("n_trials", "mean_response_ms", "std_response_ms",
                       "time_constant_ms", "tau_jitter_sigma_ms",
                       "steady_bias_mean_deg", "steady_bias_sigma_deg")


def fmt(value, digits: int = 6) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    text = f"{value:.{digits}f}"
    # avoid a signed zero in the output
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def bench_rows(records: list[TrialRecord]) -> list[tuple]:
    # trials are numbered from 1 as in the published table
    return [(r.trial_index + 1, fmt(r.commanded, 3), fmt(r.measured_steady, 3),
             fmt(r.response_time, 3), fmt(r.failed)) for r in records]


def stats_footer(stats: TrialStats | None) -> list[str]:
    if stats is None:
        return []
    return ["# stats",
            f"# n_trials,{stats.n_trials}",
            f"# mean_response_ms,{fmt(stats.mean_response, 3)}",
            f"# std_response_ms,{fmt(stats.std_response, 3)}",
            f"# mean_abs_error_deg,{fmt(stats.mean_abs_error, 4)}",
            f"# mean_signed_error_deg,{fmt(stats.mean_signed_error, 4)}",
            f"# std_signed_error_deg,{fmt(stats.std_signed_error, 4)}",
            f"# failure_count,{stats.failure_count}"]


def render_csv(columns, rows, footer: list[str] = ()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v, 9) if isinstance(v, float) else fmt(v) for v in row])
    for line in footer:
        buf.write(line + "\n")
    return buf.getvalue()


def emit_csv(path: str | Path, columns, rows, footer: list[str] = ()) -> Path:
    """Write header, rows and optional footer; raises ``OSError`` on failure."""
    path = Path(path)
    text = render_csv(columns, rows, footer)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def fly_csv(records) -> str:
    return render_csv(FLY_COLUMNS, records)


def read_bench_csv(path: str | Path) -> list[TrialRecord]:
    """Parse a bench CSV (comment lines skipped) back into trial records."""
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    missing = [c for c in BENCH_COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        raise ValueError(f"{path}: missing column(s) {', '.join(missing)}")
    out = []
    for i, row in enumerate(reader):
        try:
            resp = row["response_ms"].strip()
            out.append(TrialRecord(
                int(row["trial"]) - 1, float(row["commanded_deg"]),
                float(row["measured_deg"]), float(resp) if resp else None,
                row["failed"].strip() in ("1", "true", "True")))
        except ValueError as exc:
            raise ValueError(f"{path}: data row {i + 1}: {exc}") from None
    return out
