"""Hitting-time harness tests: minima, censoring, determinism, sweeps,
fits, theory comparison, and CSV output."""
import csv
import math

import numpy as np
import pytest

from heavyball import (
    DynamicsParams,
    ExperimentSpec,
    IntegratorConfig,
    PhasePoint,
    SweepKind,
    compare_to_theory,
    find_local_minimum,
    hitting_time,
    loglog_fit,
    make_objective,
    run_sweep,
)
from heavyball.experiments import (
    GridPoint,
    NonMinimumConvergenceError,
    SweepResult,
    _resolve_grid_point,
    _trial_seed,
    write_summary_csv,
    write_trials_csv,
)

BENCH_LAM = (9.0, 7.0, 5.0, 3.0, 1.0, -1.0, -3.0, -5.0, -7.0, -9.0)


def _mini_spec(**kw):
    base = dict(
        objective_kind="cubic_reg_quadratic",
        lam=(2.0, -1.0),
        alpha=1.0,
        sweep_kind=SweepKind.STEPSIZE,
        grid=(1e-4, 3e-4, 1e-3),
        threshold_C=1e-3,
        trials=4,
        master_seed=99,
        jitter_radius=1e-3,
        sigma2=1.0,
        max_steps=2_000_000,
        threads=1,
    )
    base.update(kw)
    return ExperimentSpec(**base)


def test_make_objective_rejects_unknown_kind():
    with pytest.raises(ValueError):
        make_objective("cubic", [1.0])


def test_find_local_minimum_reference_instance():
    """The d=10 benchmark landscape has minima at +-6 e_last with value -108."""
    f = make_objective("cubic_reg_quadratic", BENCH_LAM)
    start = np.zeros(10)
    start[9] = 6.0 * 2.0 / 3.0
    x_star, f_star = find_local_minimum(f, start)
    assert f_star == pytest.approx(-108.0, abs=1e-8)
    expected = np.zeros(10)
    expected[9] = 6.0
    assert np.allclose(np.abs(x_star), expected, atol=1e-8)


def test_find_local_minimum_rejects_saddle_basin():
    f = make_objective("quadratic", (1.0, -1.0))  # no minimum at all
    with pytest.raises(NonMinimumConvergenceError):
        find_local_minimum(f, np.array([1.0, 0.0]), max_steps=50_000)


def test_hitting_time_zero_when_already_below():
    f = make_objective("cubic_reg_quadratic", (2.0, -1.0))
    x = np.zeros(2)
    x[1] = 2.0 / 3.0  # at the minimum already
    rec = hitting_time(f, -4.0 / 27.0, PhasePoint(x, np.zeros(2)),
                       DynamicsParams(alpha=1.0, epsilon=0.01, dim=2),
                       IntegratorConfig(step=0.01, max_steps=100), C=1e-3)
    assert rec.t_x == 0.0 and rec.steps == 0 and not rec.censored


def test_hitting_time_censoring():
    f = make_objective("cubic_reg_quadratic", (2.0, -1.0))
    rec = hitting_time(f, -4.0 / 27.0, PhasePoint(1e-8 * np.ones(2), np.zeros(2)),
                       DynamicsParams(alpha=1.0, epsilon=0.001, dim=2, sigma2=0.0),
                       IntegratorConfig(step=0.001, max_steps=50), C=1e-3)
    assert rec.censored and rec.t_x is None and rec.steps == 50
    assert rec.terminal_f_gap > 1e-3


def test_hitting_time_rejects_bad_threshold():
    f = make_objective("quadratic", (1.0,))
    with pytest.raises(ValueError):
        hitting_time(f, 0.0, PhasePoint([1.0], [0.0]),
                     DynamicsParams(alpha=1.0, epsilon=0.01, dim=1),
                     IntegratorConfig(step=0.01, max_steps=10), C=0.0)


def test_spec_validation():
    with pytest.raises(ValueError, match="sorted"):
        _mini_spec(grid=(1e-3, 1e-4))
    with pytest.raises(ValueError, match="trials"):
        _mini_spec(trials=0)
    with pytest.raises(ValueError, match="cubic"):
        _mini_spec(objective_kind="quadratic", sweep_kind=SweepKind.GAMMA1,
                   grid=(1.0, 2.0))


def test_resolve_grid_point_semantics():
    spec = _mini_spec()
    eps, alpha, g1, lam = _resolve_grid_point(spec, 1e-4)
    assert eps == pytest.approx(math.sqrt(1e-4))  # grid carries s = eps^2
    assert alpha == 1.0 and g1 == 2.0 and lam == (2.0, -1.0)

    spec = _mini_spec(sweep_kind=SweepKind.ALPHA, grid=(0.5, 1.0, 2.0), epsilon=0.01)
    eps, alpha, g1, lam = _resolve_grid_point(spec, 2.0)
    assert (eps, alpha, g1) == (0.01, 2.0, 2.0)

    spec = _mini_spec(sweep_kind=SweepKind.GAMMA1, grid=(4.0, 8.0))
    eps, alpha, g1, lam = _resolve_grid_point(spec, 8.0)
    assert g1 == 8.0 and lam == (2.0, -4.0)  # hess(0) eigenvalue is exactly -8

    spec = _mini_spec(sweep_kind=SweepKind.GAMMA1_EQ_ALPHA_SQ, grid=(4.0, 9.0))
    eps, alpha, g1, lam = _resolve_grid_point(spec, 9.0)
    assert alpha == pytest.approx(3.0) and g1 == 9.0 and lam == (2.0, -4.5)


def test_trial_seed_is_schedule_independent():
    _, s1 = _trial_seed(7, 2, 5)
    _, s2 = _trial_seed(7, 2, 5)
    _, s3 = _trial_seed(7, 2, 6)
    assert s1 == s2 != s3


def test_run_sweep_deterministic_across_thread_counts():
    spec1 = _mini_spec(trials=6, grid=(1e-4, 4e-4), threads=1)
    spec2 = _mini_spec(trials=6, grid=(1e-4, 4e-4), threads=3)
    r1 = run_sweep(spec1)
    r2 = run_sweep(spec2)
    for p1, p2 in zip(r1.points, r2.points):
        assert [r.t_x for r in p1.records] == [r.t_x for r in p2.records]
        assert [r.seed for r in p1.records] == [r.seed for r in p2.records]


def test_run_sweep_aggregates():
    r = run_sweep(_mini_spec(trials=5))
    assert r.sweep_param == "s"
    assert len(r.points) == 3
    for p in r.points:
        assert len(p.records) == 5
        assert p.censored_count == 0
        finite = [rec.t_x for rec in p.records]
        assert p.mean_T == pytest.approx(np.mean(finite))
        assert p.median_T == pytest.approx(np.median(finite))


def test_loglog_fit_recovers_exact_power_law():
    xs = np.logspace(-6, -2, 8)
    ys = 3.0 * xs ** -0.5
    fit = loglog_fit(xs, ys)
    assert fit.slope == pytest.approx(-0.5, abs=1e-9)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-9)
    assert fit.r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        loglog_fit([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        loglog_fit([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])


def _synthetic_stepsize_result(rate, alpha=1.0, gamma1=2.0):
    spec = _mini_spec(grid=(1e-6, 1e-5, 1e-4), trials=1)
    points = []
    for s in spec.grid:
        eps = math.sqrt(s)
        mean = rate * (1.0 / eps) * math.log(1.0 / eps)
        points.append(GridPoint(value=s, epsilon=eps, alpha=alpha, gamma1=gamma1,
                                lam=spec.lam, f_star=0.0, records=(),
                                mean_T=mean, median_T=mean, ci95_half=0.01 * mean,
                                censored_count=0, flagged=False))
    return SweepResult(spec=spec, sweep_param="s", points=tuple(points))


def test_compare_to_theory_flat_synthetic_ratio():
    from heavyball import predicted_exit_rate

    rate = predicted_exit_rate(1, 2.0, 1.0)
    rep = compare_to_theory(_synthetic_stepsize_result(rate))
    assert rep["predicted_rate"] == pytest.approx(rate)
    for row in rep["points"]:
        assert row["ratio_mean"] == pytest.approx(rate, rel=1e-12)
    assert abs(rep["ratio_trend_slope_vs_ln_eps"]) <= 1e-12
    assert rep["bounded"]


def test_compare_to_theory_detects_excess():
    rep = compare_to_theory(_synthetic_stepsize_result(10.0))
    assert not rep["bounded"]


def test_compare_to_theory_requires_stepsize_sweep():
    r = run_sweep(_mini_spec(sweep_kind=SweepKind.ALPHA, grid=(0.5, 1.0, 2.0),
                             trials=2, epsilon=0.02))
    with pytest.raises(ValueError):
        compare_to_theory(r)


def test_csv_outputs(tmp_path):
    r = run_sweep(_mini_spec(trials=3, grid=(1e-4, 4e-4)))
    trials_path = tmp_path / "trials.csv"
    summary_path = tmp_path / "summary.csv"
    write_trials_csv(r, trials_path)
    write_summary_csv(r, summary_path)
    with open(trials_path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert rows[0]["sweep_param"] == "s"
    assert sorted({float(row["value"]) for row in rows}) == [1e-4, 4e-4]
    with open(summary_path) as fh:
        srows = list(csv.DictReader(fh))
    assert len(srows) == 2
    assert srows[0]["n_trials"] == "3"
    # trial T_x values round-trip at full precision
    p0 = r.points[0].records[0]
    assert float(rows[0]["T_x"]) == p0.t_x


def test_censored_rows_have_blank_t_x(tmp_path):
    spec = _mini_spec(trials=2, grid=(1e-6,), max_steps=10, jitter_radius=1e-9)
    r = run_sweep(spec)
    assert r.points[0].censored_count == 2
    assert r.points[0].flagged
    path = tmp_path / "trials.csv"
    write_trials_csv(r, path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert all(row["T_x"] == "" and row["censored"] == "1" for row in rows)
