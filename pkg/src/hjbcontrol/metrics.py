"""Performance indices and comparison tables for benchmark runs.

Three indices are computed from a sampled trajectory:

* ITSE, the integral of time-weighted squared error
  ``int_0^T t * e(t)'e(t) dt``;
* cumulative cost ``J = int_0^T [e'e + tau'tau + taudot'taudot] dt``,
  always evaluated with identity weights regardless of what the
  controller optimized, so different methods are compared on one scale;
* convergence time, the first simulated time after which ||e|| stays
  below a threshold (default 1e-3) through the end of the horizon.

Integrals use the composite trapezoidal rule on the recorded grid and
taudot comes from central differences (one-sided at the endpoints).
Wall-clock time is measured with a monotonic timer and reported, never
asserted against: it is hardware specific.

Runs that never converge (or diverge outright) render as ``N/C`` in
tables, while the underlying numeric values are preserved in the
machine-readable records.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import ConfigurationError
from .simulate import Trajectory

__all__ = [
    "MetricsReport",
    "itse",
    "cumulative_cost",
    "convergence_time",
    "wall_clock",
    "wall_clock_to_threshold",
    "median_wall_clock",
    "report_from_run",
    "comparison_table",
    "render_table",
    "write_metrics_file",
    "read_metrics_file",
    "write_records",
    "read_records",
]

NOT_CONVERGED = "N/C"


def _resolve_errors(traj: Trajectory, reference) -> np.ndarray:
    """Error samples e(t): explicit reference > recorded errors > states."""
    if reference is not None:
        x_d = getattr(reference, "x_d", reference)
        return traj.states - np.array([x_d(t) for t in traj.times])
    if traj.errors is not None:
        return traj.errors
    return traj.states


def itse(traj: Trajectory, reference=None) -> float:
    """Integral of time-weighted squared error over the recorded horizon."""
    if len(traj.times) == 0:
        raise ConfigurationError("empty trajectory")
    e = _resolve_errors(traj, reference)
    return float(np.trapezoid(traj.times * np.sum(e * e, axis=1), traj.times))


def cumulative_cost(traj: Trajectory, reference=None) -> float:
    """J = int [e'e + tau'tau + taudot'taudot] dt with identity weights."""
    if len(traj.times) < 2:
        raise ConfigurationError("cumulative cost needs at least two samples")
    e = _resolve_errors(traj, reference)
    dt = traj.times[1] - traj.times[0]
    tau_dot = np.gradient(traj.controls, dt, axis=0)
    integrand = (
        np.sum(e * e, axis=1)
        + np.sum(traj.controls**2, axis=1)
        + np.sum(tau_dot**2, axis=1)
    )
    return float(np.trapezoid(integrand, traj.times))


def convergence_time(traj: Trajectory, threshold: float = 1e-3, reference=None):
    """First time ||e|| drops below the threshold and stays there.

    Returns None (not converged) when the error never settles below the
    threshold through the end of the horizon, or when the run diverged.
    """
    if len(traj.times) == 0:
        raise ConfigurationError("empty trajectory")
    if traj.diverged:
        return None
    e = _resolve_errors(traj, reference)
    norms = np.linalg.norm(e, axis=1)
    above = np.nonzero(norms >= threshold)[0]
    if len(above) == 0:
        return 0.0
    if above[-1] == len(norms) - 1:
        return None
    return float(traj.times[above[-1] + 1])


def wall_clock(run):
    """Elapsed monotonic seconds around a callable; returns (seconds, result)."""
    t0 = time.perf_counter()
    result = run()
    return time.perf_counter() - t0, result


def wall_clock_to_threshold(
    traj: Trajectory, wall_clock_s: float, threshold: float = 1e-3, reference=None
) -> float:
    """Wall-clock share spent before the error settles below the threshold.

    Runs that never settle are charged the full wall time. The split
    assumes uniform per-step cost, which holds for the fixed-step
    integrator used here.
    """
    conv = convergence_time(traj, threshold, reference)
    if conv is None or len(traj.times) < 2:
        return wall_clock_s
    frac = conv / float(traj.times[-1])
    return wall_clock_s * frac


def median_wall_clock(run, repeats: int = 5):
    """Median elapsed seconds over repeated runs; returns (median, first result)."""
    if repeats < 1:
        raise ConfigurationError("repeats must be >= 1")
    times = []
    first = None
    for i in range(repeats):
        elapsed, result = wall_clock(run)
        times.append(elapsed)
        if i == 0:
            first = result
    return statistics.median(times), first


@dataclass
class MetricsReport:
    """One row of a method-by-example comparison."""

    example: str
    case: str
    method: str
    itse: float
    cumulative_cost: float
    convergence_time_s: float | None
    wall_clock_s: float
    status: str
    dt: float
    horizon_T: float


def report_from_run(
    traj: Trajectory,
    wall_clock_s: float,
    example: str,
    method: str,
    case: str = "",
    reference=None,
    threshold: float = 1e-3,
) -> MetricsReport:
    """Assemble the three indices for one run into a report row."""
    conv = convergence_time(traj, threshold, reference)
    return MetricsReport(
        example=example,
        case=case,
        method=method,
        itse=itse(traj, reference),
        cumulative_cost=cumulative_cost(traj, reference),
        convergence_time_s=conv,
        wall_clock_s=wall_clock_s,
        status="converged" if conv is not None else "not_converged",
        dt=float(traj.meta.get("dt", np.nan)),
        horizon_T=float(traj.meta.get("horizon_T", np.nan)),
    )


_METHOD_ORDER = {"sola": 0, "proposed": 1}


def comparison_table(reports) -> list[MetricsReport]:
    """Stable-ordered rows: by example, then case, then baseline-first."""
    if not reports:
        raise ConfigurationError("no reports to tabulate")
    return sorted(
        reports,
        key=lambda r: (r.example, r.case, _METHOD_ORDER.get(r.method, 99), r.method),
    )


def _fmt_metric(value: float, status: str) -> str:
    if status != "converged":
        return NOT_CONVERGED
    return f"{value:.3f}"


def render_table(reports, title: str = "") -> str:
    """Aligned plain-text comparison table.

    The header always states dt and horizon so the (horizon-dependent)
    index values stay interpretable; a footnote explains N/C.
    """
    rows = comparison_table(reports)
    header = ["Example", "Case", "Method", "ITSE", "Cumulative Cost",
              "Convergence Time (s)", "Wall Clock (s)"]
    body = []
    for r in rows:
        conv = (
            NOT_CONVERGED if r.convergence_time_s is None
            else f"{r.convergence_time_s:.3f}"
        )
        body.append([
            r.example,
            r.case or "-",
            r.method,
            _fmt_metric(r.itse, r.status),
            _fmt_metric(r.cumulative_cost, r.status),
            conv,
            f"{r.wall_clock_s:.4f}",
        ])
    widths = [max(len(header[i]), *(len(b[i]) for b in body)) for i in range(len(header))]
    lines = []
    if title:
        lines.append(title)
    grids = sorted({(r.dt, r.horizon_T) for r in rows})
    lines.append(
        "grid: " + "; ".join(f"dt={dt:g} s, T={T:g} s" for dt, T in grids)
    )
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for b in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(b, widths)))
    lines.append(f"{NOT_CONVERGED}: not converged")
    return "\n".join(lines)


def write_metrics_file(path, report: MetricsReport):
    """Flat key = value record of one run."""
    conv = (
        NOT_CONVERGED if report.convergence_time_s is None
        else repr(report.convergence_time_s)
    )
    with open(path, "w") as fh:
        fh.write(f"itse = {report.itse!r}\n")
        fh.write(f"cumulative_cost = {report.cumulative_cost!r}\n")
        fh.write(f"convergence_time_s = {conv}\n")
        fh.write(f"wall_clock_s = {report.wall_clock_s!r}\n")
        fh.write(f"status = {report.status}\n")


def read_metrics_file(path) -> dict:
    """Parse a flat key = value metrics record."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "status":
                out[key] = value
            elif value == NOT_CONVERGED:
                out[key] = None
            else:
                out[key] = float(value)
    return out


def write_records(path, reports):
    """Machine-readable CSV of report rows, full float precision."""
    cols = [f.name for f in fields(MetricsReport)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for r in reports:
            writer.writerow([
                getattr(r, c) if getattr(r, c) is not None else NOT_CONVERGED
                for c in cols
            ])


def read_records(path) -> list[MetricsReport]:
    """Read rows written by :func:`write_records`."""
    reports = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            conv = row["convergence_time_s"]
            reports.append(MetricsReport(
                example=row["example"],
                case=row["case"],
                method=row["method"],
                itse=float(row["itse"]),
                cumulative_cost=float(row["cumulative_cost"]),
                convergence_time_s=None if conv == NOT_CONVERGED else float(conv),
                wall_clock_s=float(row["wall_clock_s"]),
                status=row["status"],
                dt=float(row["dt"]),
                horizon_T=float(row["horizon_T"]),
            ))
    return reports
