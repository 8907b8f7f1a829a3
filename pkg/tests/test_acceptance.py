"""Acceptance suite: one criterion per numbered test, each printing a
PASS/FAIL line.

The quantitative criteria pin the benchmark setups exactly: identity
weights, the per-example gamma, x0 and grid as configured in
``hjbcontrol.scenarios``. Two reference ITSE targets (examples I and III)
are known not to be reproduced by this implementation; see the README's
"benchmark reference values" note. Their window assertions live in
dedicated ``*_itse_reference`` tests so everything that does hold stays
green and visible.
"""

import time

import numpy as np
import pytest

from hjbcontrol import (
    CostConfig,
    IntegratorConfig,
    builtin_example,
    convergence_time,
    cumulative_cost,
    feasible_sinusoid_reference,
    itse,
    median_wall_clock,
    regulation_control,
    rk4_step,
    simulate_regulation,
    simulate_tracking,
    verify_gamma_over_grid,
    wall_clock,
    wall_clock_to_threshold,
    zero_reference,
)
from hjbcontrol.scenarios import (
    ALL_SCENARIOS,
    EXAMPLE_GAMMA,
    EXAMPLE_X0,
    run_proposed,
    run_sola,
    scenario_cost,
    scenario_model,
)

# reference benchmark values the quantitative criteria compare against,
# each with a factor-of-3 acceptance window
REFERENCE_ITSE = {("I", None): 35.977, ("II", 1): 2.036, ("II", 2): 2.684,
                  ("III", None): 1.155}
REFERENCE_COST = {("I", None): 876.785}
WINDOW = 3.0


def crit(num, ok, detail):
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def scenario_label(key):
    example, case = key
    return f"example {example}" + (f" case {case}" if case else "")


@pytest.fixture(scope="module")
def proposed_runs():
    """All four standard closed-form runs with their wall times."""
    runs = {}
    for example, case in ALL_SCENARIOS:
        elapsed, traj = wall_clock(lambda: run_proposed(example, case))
        runs[(example, case)] = (traj, elapsed)
    return runs


@pytest.fixture(scope="module")
def sola_runs():
    runs = {}
    for example, case in ALL_SCENARIOS:
        elapsed, traj = wall_clock(lambda: run_sola(example, case))
        runs[(example, case)] = (traj, elapsed)
    return runs


# -------------------------------------------------------------- criterion 1

def test_criterion_01_hjb_closure_identity(rng):
    t0 = time.perf_counter()
    worst = 0.0
    for example, case in ALL_SCENARIOS:
        model = scenario_model(example, case)
        cfg = scenario_cost(model, example)
        for _ in range(1000):
            x = rng.uniform(-5, 5, size=model.state_dim)
            dec = regulation_control(model, cfg, x)
            if dec.degenerate:
                continue
            resid = abs(float(dec.u_aug @ cfg.R @ dec.u_aug) - dec.state_penalty)
            worst = max(worst, resid / (1.0 + dec.state_penalty))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 1.0
    assert crit(1, ok, f"HJB closure identity: worst relative residual "
                       f"{worst:.2e} over 4000 states in {elapsed:.2f}s")
    assert worst < 1e-9
    assert elapsed < 1.0


# -------------------------------------------------------------- criterion 2

def test_criterion_02_lyapunov_monotonicity(proposed_runs):
    details = []
    ok = True
    for key, (traj, _) in proposed_runs.items():
        V = 0.5 * np.sum(traj.states**2, axis=1)
        worst_step = float(np.diff(V).max())
        ok = ok and worst_step <= 1e-9 and not traj.diverged
        details.append(f"{scenario_label(key)}: max dV {worst_step:.1e}")
    assert crit(2, ok, "Lyapunov nonincreasing on all regulation runs; "
                       + "; ".join(details))


# -------------------------------------------------------------- criterion 3

def test_criterion_03_example_i_convergence_and_cost(proposed_runs):
    traj, elapsed = proposed_runs[("I", None)]
    final_norm = float(np.linalg.norm(traj.states[-1]))
    cost = cumulative_cost(traj)
    measured_itse = itse(traj)
    ref_cost = REFERENCE_COST[("I", None)]
    ref_itse = REFERENCE_ITSE[("I", None)]
    conv_ok = final_norm < 1e-3
    cost_ok = ref_cost / WINDOW <= cost <= ref_cost * WINDOW
    itse_ok = ref_itse / WINDOW <= measured_itse <= ref_itse * WINDOW
    time_ok = elapsed < 5.0
    crit(3, conv_ok and cost_ok and itse_ok and time_ok,
         f"example I: |x(T)|={final_norm:.2e} (<1e-3: {conv_ok}), "
         f"cost={cost:.3f} vs {ref_cost} (in window: {cost_ok}), "
         f"ITSE={measured_itse:.3f} vs {ref_itse} (in window: {itse_ok}), "
         f"runtime {elapsed:.2f}s")
    assert conv_ok
    assert cost_ok
    assert time_ok


def test_criterion_03_itse_reference(proposed_runs):
    # known-red: the simulated trajectory reproduces the reference
    # cumulative cost to 2 percent, but its time-weighted squared error
    # integral is an order of magnitude below the published reference
    # value; see README (benchmark reference values)
    traj, _ = proposed_runs[("I", None)]
    measured = itse(traj)
    ref = REFERENCE_ITSE[("I", None)]
    assert ref / WINDOW <= measured <= ref * WINDOW, (
        f"example I ITSE {measured:.3f} outside factor-{WINDOW:g} window of "
        f"{ref} [{ref / WINDOW:.3f}, {ref * WINDOW:.3f}]; the same run's "
        f"cumulative cost matches its reference within 2%"
    )


# -------------------------------------------------------------- criterion 4

def test_criterion_04_example_ii_both_cases(proposed_runs):
    results = []
    ok = True
    for case in (1, 2):
        traj, elapsed = proposed_runs[("II", case)]
        conv = convergence_time(traj)
        measured = itse(traj)
        ref = REFERENCE_ITSE[("II", case)]
        case_ok = (
            conv is not None
            and ref / WINDOW <= measured <= ref * WINDOW
            and elapsed < 5.0
        )
        ok = ok and case_ok
        results.append(
            f"case {case}: conv at t={conv if conv is not None else 'never'}, "
            f"ITSE={measured:.3f} vs {ref}, runtime {elapsed:.2f}s"
        )
        assert conv is not None, f"case {case} did not converge below 1e-3"
        assert ref / WINDOW <= measured <= ref * WINDOW
        assert elapsed < 5.0
    crit(4, ok, "example II: " + "; ".join(results))


# -------------------------------------------------------------- criterion 5

def test_criterion_05_example_iii_convergence(proposed_runs):
    traj, elapsed = proposed_runs[("III", None)]
    conv = convergence_time(traj)
    measured = itse(traj)
    ref = REFERENCE_ITSE[("III", None)]
    conv_ok = conv is not None
    itse_ok = ref / WINDOW <= measured <= ref * WINDOW
    time_ok = elapsed < 5.0
    crit(5, conv_ok and itse_ok and time_ok,
         f"example III: conv at t={conv}, ITSE={measured:.3f} vs {ref} "
         f"(in window: {itse_ok}), runtime {elapsed:.2f}s")
    assert conv_ok
    assert time_ok


def test_criterion_05_itse_reference(proposed_runs):
    # known-red, same situation as the example I reference (see README)
    traj, _ = proposed_runs[("III", None)]
    measured = itse(traj)
    ref = REFERENCE_ITSE[("III", None)]
    assert ref / WINDOW <= measured <= ref * WINDOW, (
        f"example III ITSE {measured:.3f} outside factor-{WINDOW:g} window "
        f"of {ref} [{ref / WINDOW:.3f}, {ref * WINDOW:.3f}]"
    )


# -------------------------------------------------------------- criterion 6

def test_criterion_06_baseline_ordering(proposed_runs, sola_runs):
    checks = []
    ok = True
    for key in (("I", None), ("II", 1)):
        prop, _ = proposed_runs[key]
        base, _ = sola_runs[key]
        p_itse, b_itse = itse(prop), itse(base)
        p_cost, b_cost = cumulative_cost(prop), cumulative_cost(base)
        pair_ok = p_itse < b_itse and p_cost < b_cost
        ok = ok and pair_ok
        checks.append(
            f"{scenario_label(key)}: ITSE {p_itse:.3f} < {b_itse:.3f} and "
            f"cost {p_cost:.3f} < {b_cost:.3f} ({pair_ok})"
        )
        assert pair_ok
    base22, _ = sola_runs[("II", 2)]
    nc_ok = convergence_time(base22) is None
    ok = ok and nc_ok
    checks.append(f"example II case 2 baseline N/C: {nc_ok}")
    assert nc_ok
    crit(6, ok, "baseline ordering: " + "; ".join(checks))


# -------------------------------------------------------------- criterion 7

def test_criterion_07_integrator_oracle():
    model = builtin_example("I")
    cfg = CostConfig.identity(model, EXAMPLE_GAMMA["I"])
    x0 = EXAMPLE_X0["I"]
    coarse = simulate_regulation(model, cfg, x0, IntegratorConfig(1e-3, 10.0))
    fine = simulate_regulation(model, cfg, x0, IntegratorConfig(5e-4, 10.0))
    delta = float(np.linalg.norm(coarse.states[-1] - fine.states[-1]))

    # single RK4 step against the 4th-order truncated matrix exponential
    rng = np.random.default_rng(11)
    A = rng.normal(size=(4, 4))
    x = rng.normal(size=4)
    dt = 0.02
    stepped = rk4_step(lambda t, z: A @ z, 0.0, x, dt)
    series = np.eye(4)
    term = np.eye(4)
    for k in range(1, 5):
        term = term @ (A * dt) / k
        series = series + term
    series_err = float(np.max(np.abs(stepped - series @ x)))

    ok = delta < 1e-6 and series_err < 1e-12
    assert crit(7, ok, f"integrator: step-halving delta {delta:.2e} (<1e-6), "
                       f"series oracle error {series_err:.2e}")


# -------------------------------------------------------------- criterion 8

def test_criterion_08_tracking_reduction_and_invariance():
    model = builtin_example("I")
    cfg = CostConfig.identity(model, 1.0)
    icfg = IntegratorConfig(1e-3, 10.0)

    reg = simulate_regulation(model, cfg, [5.0, -5.0], icfg)
    trk = simulate_tracking(model, cfg, zero_reference(model), [5.0, -5.0], icfg)
    bitwise_ok = (
        np.array_equal(reg.states, trk.states)
        and np.array_equal(reg.controls, trk.controls)
    )

    ref = feasible_sinusoid_reference(0.5, 1.0)
    inv = simulate_tracking(model, cfg, ref, ref.x_d(0.0), icfg)
    max_err = float(np.max(np.linalg.norm(inv.errors, axis=1)))
    inv_ok = max_err < 1e-6

    ok = bitwise_ok and inv_ok
    assert crit(8, ok, f"tracking: zero-reference run bitwise-equal "
                       f"({bitwise_ok}); feasible sinusoid max |e| "
                       f"{max_err:.2e} (<1e-6)")


# -------------------------------------------------------------- criterion 9

def test_criterion_09_gamma_admissibility():
    box = [[-5.0, 5.0], [-5.0, 5.0]]
    ok = True
    details = []
    for example, case in ALL_SCENARIOS:
        model = scenario_model(example, case)
        cfg = scenario_cost(model, example)
        report = verify_gamma_over_grid(model, cfg, box, 51)
        ok = ok and report.admissible
        details.append(f"{scenario_label((example, case))} "
                       f"gamma={cfg.gamma}: {report.admissible}")
        assert report.admissible

    # constructed violation must be detected
    model = scenario_model("II", 1)
    bad = CostConfig(Q0=np.zeros((2, 2)), R=np.eye(2), gamma=-1.0)
    report = verify_gamma_over_grid(model, bad, box, 51)
    ok = ok and not report.admissible and report.worst_margin < 0.0
    assert not report.admissible
    assert report.worst_margin < 0.0
    details.append(f"violation detected at margin {report.worst_margin:.3g}")
    crit(9, ok, "gamma admissibility: " + "; ".join(details))


# -------------------------------------------------------------- criterion 10

def test_criterion_10_wall_clock_reporting():
    # non-gating beyond the ordering: the benchmark's computation-time
    # metric (wall-clock until the error settles below 1e-3, full horizon
    # when it never does) must favor the closed-form method on the same
    # machine; absolute times are hardware specific and only reported
    med_prop, prop = median_wall_clock(lambda: run_proposed("I"), repeats=3)
    med_base, base = median_wall_clock(lambda: run_sola("I"), repeats=3)
    t_prop = wall_clock_to_threshold(prop, med_prop)
    t_base = wall_clock_to_threshold(base, med_base)
    ok = t_prop <= t_base
    assert crit(
        10, ok,
        f"wall clock (median of 3): proposed full-run {med_prop:.3f}s, "
        f"baseline full-run {med_base:.3f}s; time-to-threshold "
        f"{t_prop:.3f}s vs {t_base:.3f}s (proposed <= baseline: {ok})",
    )
