"""Command-line front end.

Three subcommands:

* ``run``          - simulate one scenario, write a trajectory CSV and a
  metrics record, optionally plot.
* ``bench``        - run method-by-example comparisons and emit aligned
  tables plus machine-readable records.
* ``verify-gamma`` - sweep the state-penalty admissibility condition over
  a box.

Exit codes: 0 success, 1 usage/configuration error, 2 run did not
converge, 3 inadmissible gamma. Scenario options may come from a flat
``key = value`` config file (``--config``); explicit flags win over file
values.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, HJBControlError
from .metrics import (
    median_wall_clock,
    render_table,
    report_from_run,
    wall_clock,
    write_metrics_file,
    write_records,
)
from .regulation import CostConfig, verify_gamma_over_grid
from .scenarios import (
    ALL_SCENARIOS,
    DEFAULT_DT,
    EXAMPLE_GAMMA,
    EXAMPLE_HORIZON,
    EXAMPLE_X0,
    scenario_model,
)
from .simulate import IntegratorConfig, lyapunov_series, simulate_regulation, simulate_tracking
from .sola import builtin_basis, builtin_sola_config, simulate_sola
from .tracking import feasible_sinusoid_reference, sinusoid_reference

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_INADMISSIBLE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as exit code 1."""

    def error(self, message):
        raise _UsageError(message)


@dataclass
class ScenarioConfig:
    """Validated description of one run; built before any simulation."""

    example: str
    case: int | None
    method: str
    x0: np.ndarray
    q0_diag: np.ndarray
    r_diag: np.ndarray
    gamma: float
    deadzone_eps: float
    dt: float
    horizon_T: float
    track: str
    track_amplitude: float
    track_frequency: float


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError as err:
        raise _UsageError(f"cannot parse number list {text!r}: {err}") from None


def _diag_from_entries(entries, dim: int, what: str) -> np.ndarray:
    """A scalar means scalar * I; a comma list gives the diagonal."""
    vals = _parse_floats(entries) if isinstance(entries, str) else [float(entries)]
    if len(vals) == 1:
        return np.full(dim, vals[0])
    if len(vals) != dim:
        raise _UsageError(f"{what} needs 1 or {dim} entries, got {len(vals)}")
    return np.array(vals)


_CONFIG_KEYS = (
    "example", "case", "method", "x0", "q0", "r", "gamma", "deadzone_eps",
    "dt", "horizon", "track", "track_amplitude", "track_frequency",
    "out_dir", "traj_file", "metrics_file", "plot",
)


def read_config_file(path) -> dict:
    """Flat ``key = value`` scenario file; '#' starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        raise _UsageError(f"cannot read config file {path!r}: {err}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value'")
        if key not in _CONFIG_KEYS:
            raise _UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = value.strip()
    return out


def _merged_option(args, file_cfg: dict, key: str, default=None):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in file_cfg:
        return file_cfg[key]
    return default


def _build_scenario(args, file_cfg: dict) -> ScenarioConfig:
    example = _merged_option(args, file_cfg, "example")
    if example is None:
        raise _UsageError("an --example (I, II or III) is required")
    example = str(example).upper()
    if example not in ("I", "II", "III"):
        raise _UsageError(f"unknown example {example!r}; expected I, II or III")

    case = _merged_option(args, file_cfg, "case")
    case = int(case) if case is not None else None
    if example == "II":
        if case not in (1, 2):
            raise _UsageError("example II requires --case 1 or --case 2")
    elif case is not None:
        raise _UsageError(f"example {example} has no cases")

    method = str(_merged_option(args, file_cfg, "method", "proposed")).lower()
    if method not in ("proposed", "sola"):
        raise _UsageError(f"unknown method {method!r}; expected proposed or sola")

    model = scenario_model(example, case)
    m, n = model.state_dim, model.input_dim

    x0_raw = _merged_option(args, file_cfg, "x0")
    x0 = (
        np.array(EXAMPLE_X0[example])
        if x0_raw is None
        else np.array(_parse_floats(x0_raw))
    )
    if x0.shape != (m,):
        raise _UsageError(f"x0 needs {m} entries for example {example}, got {x0.shape[0]}")
    if not np.all(np.isfinite(x0)):
        raise _UsageError("x0 must be finite")

    gamma = float(_merged_option(args, file_cfg, "gamma", EXAMPLE_GAMMA[example]))
    deadzone = float(_merged_option(args, file_cfg, "deadzone_eps", 1e-10))
    if deadzone <= 0.0:
        raise _UsageError("deadzone_eps must be positive")
    dt = float(_merged_option(args, file_cfg, "dt", DEFAULT_DT))
    horizon = float(_merged_option(args, file_cfg, "horizon", EXAMPLE_HORIZON[example]))

    q0_diag = _diag_from_entries(_merged_option(args, file_cfg, "q0", 1.0), m, "q0")
    r_diag = _diag_from_entries(_merged_option(args, file_cfg, "r", 1.0), n + 1, "r")
    if np.any(r_diag <= 0.0):
        raise _UsageError("r diagonal must be positive")

    track = str(_merged_option(args, file_cfg, "track", "none")).lower()
    if track not in ("none", "sinusoid", "feasible-sinusoid"):
        raise _UsageError(f"unknown tracking preset {track!r}")
    if track == "feasible-sinusoid" and example != "I":
        raise _UsageError("the feasible-sinusoid preset is only defined for example I")
    if track != "none" and method == "sola":
        raise _UsageError("tracking runs support the proposed method only")
    amp = float(_merged_option(args, file_cfg, "track_amplitude", 0.5))
    freq = float(_merged_option(args, file_cfg, "track_frequency", 1.0))

    try:
        IntegratorConfig(dt=dt, horizon_T=horizon)
    except ConfigurationError as err:
        raise _UsageError(str(err)) from None

    return ScenarioConfig(
        example=example, case=case, method=method, x0=x0,
        q0_diag=q0_diag, r_diag=r_diag, gamma=gamma, deadzone_eps=deadzone,
        dt=dt, horizon_T=horizon, track=track,
        track_amplitude=amp, track_frequency=freq,
    )


def _scenario_objects(sc: ScenarioConfig):
    model = scenario_model(sc.example, sc.case)
    cfg = CostConfig(
        Q0=np.diag(sc.q0_diag), R=np.diag(sc.r_diag),
        gamma=sc.gamma, deadzone_eps=sc.deadzone_eps,
    )
    icfg = IntegratorConfig(dt=sc.dt, horizon_T=sc.horizon_T)
    ref = None
    if sc.track == "sinusoid":
        ref = sinusoid_reference(model, sc.track_amplitude, sc.track_frequency)
    elif sc.track == "feasible-sinusoid":
        ref = feasible_sinusoid_reference(sc.track_amplitude, sc.track_frequency)
    return model, cfg, icfg, ref


def _write_trajectory_csv(path, traj, model):
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(model.state_dim)]
        + [f"tau{i + 1}" for i in range(model.input_dim)]
        + ["V", "stage_cost"]
    )
    V, _ = lyapunov_series(traj)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i, t in enumerate(traj.times):
            row = [f"{t:.12g}"]
            row += [f"{v:.12g}" for v in traj.states[i]]
            row += [f"{v:.12g}" for v in traj.controls[i]]
            row += [f"{V[i]:.12g}", f"{traj.stage_costs[i]:.12g}"]
            fh.write(",".join(row) + "\n")


def _plot_run(path, traj):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    V, _ = lyapunov_series(traj)
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    for i in range(traj.states.shape[1]):
        axes[0].plot(traj.times, traj.states[:, i], label=f"x{i + 1}")
    axes[0].set_ylabel("state")
    axes[0].legend(loc="best")
    for i in range(traj.controls.shape[1]):
        axes[1].plot(traj.times, traj.controls[:, i], label=f"tau{i + 1}")
    axes[1].set_ylabel("control")
    axes[1].legend(loc="best")
    axes[2].plot(traj.times, V)
    axes[2].set_ylabel("V = |x|^2 / 2")
    axes[2].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_run(args) -> int:
    file_cfg = read_config_file(args.config) if args.config else {}
    sc = _build_scenario(args, file_cfg)
    model, cfg, icfg, ref = _scenario_objects(sc)

    def do_run():
        if sc.method == "sola":
            return simulate_sola(
                model, builtin_basis(sc.example), builtin_sola_config(sc.example),
                sc.x0, icfg,
            )
        if ref is not None:
            return simulate_tracking(model, cfg, ref, sc.x0, icfg)
        return simulate_regulation(model, cfg, sc.x0, icfg)

    elapsed, traj = wall_clock(do_run)
    case_txt = str(sc.case) if sc.case is not None else ""
    report = report_from_run(
        traj, elapsed, example=sc.example, method=sc.method, case=case_txt,
    )

    traj_file = _merged_option(args, file_cfg, "traj_file", "trajectory.csv")
    metrics_file = _merged_option(args, file_cfg, "metrics_file", "metrics.txt")
    _write_trajectory_csv(traj_file, traj, model)
    write_metrics_file(metrics_file, report)
    plot_file = _merged_option(args, file_cfg, "plot")
    if plot_file:
        _plot_run(plot_file, traj)

    label = f"example {sc.example}" + (f" case {sc.case}" if sc.case else "")
    print(f"{label}, method {sc.method}: status={report.status}, "
          f"itse={report.itse:.6g}, cumulative_cost={report.cumulative_cost:.6g}, "
          f"wall_clock_s={elapsed:.4f}")
    print(f"trajectory -> {traj_file}")
    print(f"metrics    -> {metrics_file}")
    return EXIT_OK if report.status == "converged" else EXIT_NOT_CONVERGED


def _bench_rows(example: str, case, methods, dt, horizon, repeats):
    rows, failures = [], []
    model = scenario_model(example, case)
    cfg = CostConfig.identity(model, EXAMPLE_GAMMA[example])
    icfg = IntegratorConfig(
        dt=dt or DEFAULT_DT, horizon_T=horizon or EXAMPLE_HORIZON[example]
    )
    x0 = EXAMPLE_X0[example]
    case_txt = str(case) if case is not None else ""
    for method in methods:
        if method == "proposed":
            run = lambda: simulate_regulation(model, cfg, x0, icfg)
        else:
            run = lambda: simulate_sola(
                model, builtin_basis(example), builtin_sola_config(example), x0, icfg
            )
        try:
            elapsed, traj = median_wall_clock(run, repeats)
            rows.append(report_from_run(
                traj, elapsed, example=example, method=method, case=case_txt,
            ))
        except HJBControlError as err:
            failures.append(f"example {example}{' case ' + case_txt if case_txt else ''} "
                            f"method {method}: {err}")
    return rows, failures


def cmd_bench(args) -> int:
    if args.all:
        selected = list(ALL_SCENARIOS)
    elif args.example:
        example = args.example.upper()
        if example not in ("I", "II", "III"):
            raise _UsageError(f"unknown example {example!r}")
        if example == "II":
            selected = [("II", args.case)] if args.case else [("II", 1), ("II", 2)]
        else:
            if args.case:
                raise _UsageError(f"example {example} has no cases")
            selected = [(example, None)]
    else:
        raise _UsageError("bench needs --all or --example")

    methods = ("proposed", "sola") if args.method == "both" else (args.method,)

    all_rows, all_failures = [], []
    for example, case in selected:
        rows, failures = _bench_rows(
            example, case, methods, args.dt, args.horizon, args.repeats
        )
        all_rows.extend(rows)
        all_failures.extend(failures)

    if not all_rows:
        for line in all_failures:
            print(f"failed: {line}", file=sys.stderr)
        return EXIT_USAGE

    by_example = {}
    for row in all_rows:
        by_example.setdefault(row.example, []).append(row)
    tables = []
    for example in sorted(by_example):
        tables.append(render_table(
            by_example[example],
            title=f"Performance comparison, example {example} "
                  f"(wall clock: median of {args.repeats})",
        ))
    text = "\n\n".join(tables)
    print(text)
    for line in all_failures:
        print(f"note: row skipped, {line}")

    out_dir = args.out_dir or "."
    import os
    os.makedirs(out_dir, exist_ok=True)
    tables_path = os.path.join(out_dir, "bench_tables.txt")
    records_path = os.path.join(out_dir, "bench_records.csv")
    with open(tables_path, "w") as fh:
        fh.write(text + "\n")
    write_records(records_path, all_rows)
    print(f"tables  -> {tables_path}")
    print(f"records -> {records_path}")
    return EXIT_OK


def cmd_verify_gamma(args) -> int:
    file_cfg = read_config_file(args.config) if args.config else {}
    sc = _build_scenario(args, file_cfg)
    model, cfg, _, _ = _scenario_objects(sc)

    if args.box:
        vals = _parse_floats(args.box)
        if len(vals) != 2 * model.state_dim:
            raise _UsageError(
                f"box needs {2 * model.state_dim} numbers (per-axis min,max), "
                f"got {len(vals)}"
            )
        box = np.array(vals).reshape(model.state_dim, 2)
    else:
        box = np.array([[-5.0, 5.0]] * model.state_dim)
    if np.any(box[:, 1] < box[:, 0]):
        raise _UsageError("box must satisfy min <= max on every axis")
    if args.grid < 2:
        raise _UsageError("grid must be at least 2 points per axis")

    report = verify_gamma_over_grid(model, cfg, box, args.grid)
    verdict = "admissible" if report.admissible else "inadmissible"
    print(f"gamma={cfg.gamma:g} on example {sc.example}"
          f"{' case ' + str(sc.case) if sc.case else ''}: {verdict}")
    print(f"worst point: {np.array2string(report.worst_x, precision=6)}  "
          f"margin: {report.worst_margin:.6g}")
    return EXIT_OK if report.admissible else EXIT_INADMISSIBLE


def _build_parser() -> _Parser:
    parser = _Parser(prog="hjbcontrol",
                     description="Closed-form HJB control benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p, with_method=True):
        p.add_argument("--example", help="benchmark plant: I, II or III")
        p.add_argument("--case", type=int, help="plant II drift preset (1 or 2)")
        if with_method:
            p.add_argument("--method", choices=["proposed", "sola"], default=None)
        p.add_argument("--x0", help="comma-separated initial state")
        p.add_argument("--gamma", type=float, help="state-penalty gain")
        p.add_argument("--q0", help="Q0 diagonal: scalar or comma list")
        p.add_argument("--r", help="R diagonal: scalar or comma list (n+1 entries)")
        p.add_argument("--deadzone-eps", type=float, dest="deadzone_eps")
        p.add_argument("--dt", type=float)
        p.add_argument("--horizon", type=float, help="simulation horizon T in seconds")
        p.add_argument("--config", help="flat key = value scenario file")

    run_p = sub.add_parser("run", help="simulate one scenario")
    add_scenario_flags(run_p)
    run_p.add_argument("--track", choices=["none", "sinusoid", "feasible-sinusoid"])
    run_p.add_argument("--track-amplitude", type=float, dest="track_amplitude")
    run_p.add_argument("--track-frequency", type=float, dest="track_frequency")
    run_p.add_argument("--traj-file", dest="traj_file", help="trajectory CSV path")
    run_p.add_argument("--metrics-file", dest="metrics_file", help="metrics record path")
    run_p.add_argument("--plot", help="write a state/control/V chart (svg)")
    run_p.set_defaults(func=cmd_run)

    bench_p = sub.add_parser("bench", help="method-by-example comparison tables")
    bench_p.add_argument("--all", action="store_true", help="run every benchmark scenario")
    bench_p.add_argument("--example", help="restrict to one example")
    bench_p.add_argument("--case", type=int, help="restrict example II to one case")
    bench_p.add_argument("--method", choices=["proposed", "sola", "both"], default="both")
    bench_p.add_argument("--repeats", type=int, default=3,
                         help="wall-clock repetitions per row (median reported)")
    bench_p.add_argument("--dt", type=float)
    bench_p.add_argument("--horizon", type=float)
    bench_p.add_argument("--out-dir", dest="out_dir", help="directory for table/record files")
    bench_p.set_defaults(func=cmd_bench)

    vg_p = sub.add_parser("verify-gamma",
                          help="check the state-penalty admissibility condition on a grid")
    add_scenario_flags(vg_p, with_method=False)
    vg_p.add_argument("--box", help="per-axis min,max pairs, e.g. -5,5,-5,5")
    vg_p.add_argument("--grid", type=int, default=51, help="points per axis")
    vg_p.set_defaults(func=cmd_verify_gamma)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:  # --help and friends
        return 0 if err.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except HJBControlError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
