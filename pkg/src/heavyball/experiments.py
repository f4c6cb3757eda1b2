"""First-hitting-time Monte Carlo harness.

Measures the discrete-clock stopping time T_x = (number of heavy-ball
iterations until f(x) - f(x*) < C) over seeded independent trials, sweeps it
against the stepsize parameter or the landscape/friction parameters, and fits
power laws on log-log axes.

Reproducibility: trial (g, i) of a sweep draws all of its randomness from
numpy's SeedSequence(master_seed, spawn_key=(g, i)), so results are identical
regardless of how trials are scheduled across processes.
"""
from __future__ import annotations

import csv
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.linalg import solve
from scipy.stats import linregress

from . import _kernels
from .hamiltonian import PhasePoint
from .potentials import (
    CubicRegularizedQuadraticSpec,
    ObjectiveFunction,
    QuadraticSpec,
    make_cubic_regularized,
    make_quadratic,
    min_eigenvalue,
)
from .dynamics import DynamicsParams, IntegratorConfig, rk4_step, stochastic_heavy_ball_step
from .spectrum import predicted_exit_rate

__all__ = [
    "SweepKind",
    "ExperimentSpec",
    "HittingTimeRecord",
    "RegressionResult",
    "SweepResult",
    "NonMinimumConvergenceError",
    "make_objective",
    "find_local_minimum",
    "hitting_time",
    "run_sweep",
    "loglog_fit",
    "compare_to_theory",
    "write_trials_csv",
    "write_summary_csv",
]

#: iterations advanced per kernel call; also the Gaussian block length
CHUNK = 4096


class NonMinimumConvergenceError(RuntimeError):
    """Descent + polish landed on a point whose Hessian is not positive."""


class SweepKind(Enum):
    STEPSIZE = "StepsizeSweep"
    ALPHA = "AlphaSweep"
    GAMMA1 = "Gamma1Sweep"
    GAMMA1_EQ_ALPHA_SQ = "Gamma1EqAlphaSqSweep"


def make_objective(kind: str, lam) -> ObjectiveFunction:
    """Build one of the two config-expressible objective families."""
    if kind == "quadratic":
        return make_quadratic(QuadraticSpec(lam))
    if kind == "cubic_reg_quadratic":
        return make_cubic_regularized(CubicRegularizedQuadraticSpec(lam))
    raise ValueError(f"unknown objective kind {kind!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one sweep; mirrors the JSON config schema."""

    objective_kind: str
    lam: tuple
    alpha: float
    sweep_kind: SweepKind
    grid: tuple              # s values, alpha values, or gamma1 values
    threshold_C: float
    trials: int
    master_seed: int
    epsilon: float = 0.003   # fixed stepsize for parameter sweeps
    grid_is_epsilon: bool = False  # stepsize grid given as eps, not s = eps^2
    initial_center: tuple | None = None
    jitter_radius: float = 1e-3
    sigma1: float | None = None
    sigma2: float = 1.0
    max_steps: int = 10_000_000
    threads: int | None = None
    saddle_chain_k: int = 1

    def __post_init__(self):
        grid = tuple(float(g) for g in self.grid)
        if len(grid) == 0 or any(g <= 0 for g in grid) or list(grid) != sorted(grid):
            raise ValueError("grid must be non-empty, strictly positive, sorted ascending")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "lam", tuple(float(v) for v in self.lam))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.threshold_C <= 0:
            raise ValueError("threshold_C must be > 0")
        if self.sweep_kind in (SweepKind.GAMMA1, SweepKind.GAMMA1_EQ_ALPHA_SQ) \
                and self.objective_kind != "cubic_reg_quadratic":
            raise ValueError("gamma1 sweeps require the cubic_reg_quadratic objective")


@dataclass(frozen=True)
class HittingTimeRecord:
    trial: int
    seed: int
    t_x: float | None      # None = censored by the step cap
    steps: int
    terminal_f_gap: float

    @property
    def censored(self) -> bool:
        return self.t_x is None


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    stderr_slope: float
    r2: float
    n_points: int


@dataclass(frozen=True)
class GridPoint:
    """Resolved per-grid-point parameters plus its aggregate statistics."""

    value: float
    epsilon: float
    alpha: float
    gamma1: float
    lam: tuple
    f_star: float
    records: tuple
    mean_T: float
    median_T: float
    ci95_half: float
    censored_count: int
    flagged: bool


@dataclass(frozen=True)
class SweepResult:
    spec: ExperimentSpec
    sweep_param: str
    points: tuple


# ---------------------------------------------------------------------------
# local minimum

def find_local_minimum(f: ObjectiveFunction, start, alpha: float = 3.0,
                       max_steps: int = 2_000_000):
    """Follow the deterministic dissipative flow from `start` and Newton-polish
    the landing point to |grad| <= 1e-10.  Returns (x_star, f_star).

    Raises NonMinimumConvergenceError if the polished point has a
    non-positive Hessian eigenvalue.
    """
    x = np.atleast_1d(np.asarray(start, dtype=float))
    v = np.zeros_like(x)
    lam_max = max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(f.hess(x))))))
    h = min(0.01, 0.5 / math.sqrt(lam_max))
    for _ in range(max_steps):
        x, v = rk4_step(f, x, v, alpha, h)
        if np.linalg.norm(f.grad(x)) <= 1e-6 and np.linalg.norm(v) <= 1e-6:
            break
    else:
        raise NonMinimumConvergenceError("dissipative descent did not settle")
    for _ in range(100):
        g = f.grad(x)
        if np.linalg.norm(g) <= 1e-10:
            break
        x = x - solve(f.hess(x), g, assume_a="sym")
    if np.linalg.norm(f.grad(x)) > 1e-10:
        raise NonMinimumConvergenceError("Newton polish did not reach |grad| <= 1e-10")
    if min_eigenvalue(f.hess(x)) <= 0:
        raise NonMinimumConvergenceError("converged to a non-minimum critical point")
    return x, float(f.eval(x))


# ---------------------------------------------------------------------------
# single-trial hitting time

def _hitting_loop(f: ObjectiveFunction, x, v, params: DynamicsParams,
                  f_stop: float, max_steps: int, rng: np.random.Generator) -> int:
    """Iterate the stochastic heavy-ball update until f(x) < f_stop.

    Returns the 1-based hitting iteration, or -1 if max_steps ran out.
    Routed through the compiled kernel when the objective is one of the
    diagonal families and the noise factors are isotropic.
    """
    scales = params.isotropic_scales()
    if f.lam is not None and scales is not None:
        s1, s2 = scales
        lam = np.ascontiguousarray(f.lam)
        cubic = f.kind == "cubic_reg_quadratic"
        done = 0
        dummy = np.zeros((1, 1))
        while done < max_steps:
            n = min(CHUNK, max_steps - done)
            z2 = rng.standard_normal((n, f.dim))
            z1 = rng.standard_normal((n, f.dim)) if s1 != 0.0 else dummy
            hit = _kernels.hb_chunk(x, v, lam, cubic, params.alpha, params.epsilon,
                                    s1, s2, z2, z1, f_stop)
            if hit >= 0:
                return done + hit + 1
            done += n
        return -1
    for n in range(1, max_steps + 1):
        x[:], v[:] = stochastic_heavy_ball_step(f, (x, v), params, rng)
        if f.eval(x) < f_stop:
            return n
    return -1


def hitting_time(f: ObjectiveFunction, x_star_value: float, initial: PhasePoint,
                 params: DynamicsParams, config: IntegratorConfig, C: float,
                 rng: np.random.Generator | None = None, trial: int = 0,
                 seed: int = 0) -> HittingTimeRecord:
    """Measure T_x = first iteration with f(x) - f(x*) < C, in the discrete
    clock (iteration counts).  Censoring by max_steps is recorded, never
    treated as a hit."""
    if C <= 0:
        raise ValueError("C must be > 0")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    x = initial.X.copy()
    v = initial.V.copy()
    f_stop = x_star_value + C
    if f.eval(x) < f_stop:
        return HittingTimeRecord(trial, seed, 0.0, 0, float(f.eval(x) - x_star_value))
    hit = _hitting_loop(f, x, v, params, f_stop, config.max_steps, rng)
    gap = float(f.eval(x) - x_star_value)
    if hit < 0:
        return HittingTimeRecord(trial, seed, None, config.max_steps, gap)
    return HittingTimeRecord(trial, seed, float(hit), hit, gap)


# ---------------------------------------------------------------------------
# sweeps

def _resolve_grid_point(spec: ExperimentSpec, value: float):
    """(epsilon, alpha, gamma1, lam) for one grid value under the sweep kind."""
    lam = np.array(spec.lam)
    # gamma1 is defined from the Hessian at the saddle: hess(0) = 2*diag(lam)
    # for the cubic family, diag(lam) for the plain quadratic.
    hess_factor = 2.0 if spec.objective_kind == "cubic_reg_quadratic" else 1.0
    if spec.sweep_kind is SweepKind.STEPSIZE:
        eps = value if spec.grid_is_epsilon else math.sqrt(value)
        return eps, spec.alpha, -hess_factor * float(np.min(lam)), tuple(lam)
    if spec.sweep_kind is SweepKind.ALPHA:
        return spec.epsilon, value, -hess_factor * float(np.min(lam)), tuple(lam)
    # gamma1 sweeps: the most negative diagonal entry becomes -gamma1/2 so the
    # saddle Hessian's lowest eigenvalue is exactly -gamma1
    lam[np.argmin(lam)] = -value / hess_factor
    alpha = math.sqrt(value) if spec.sweep_kind is SweepKind.GAMMA1_EQ_ALPHA_SQ else spec.alpha
    return spec.epsilon, alpha, value, tuple(lam)


def _trial_seed(master_seed: int, grid_index: int, trial_index: int):
    ss = np.random.SeedSequence(master_seed, spawn_key=(grid_index, trial_index))
    return ss, int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_trial(task) -> tuple:
    (kind, lam, eps, alpha, sigma1, sigma2, center, jitter, f_star, C,
     max_steps, master_seed, gi, ti) = task
    f = make_objective(kind, lam)
    ss, seed = _trial_seed(master_seed, gi, ti)
    rng = np.random.Generator(np.random.PCG64(ss))
    center = np.zeros(f.dim) if center is None else np.asarray(center, dtype=float)
    x0 = center + jitter * rng.standard_normal(f.dim)
    params = DynamicsParams(alpha=alpha, epsilon=eps, dim=f.dim,
                            sigma1=sigma1, sigma2=sigma2)
    config = IntegratorConfig(step=eps, max_steps=max_steps, seed=seed)
    rec = hitting_time(f, f_star, PhasePoint(x0, np.zeros(f.dim)), params, config,
                       C, rng=rng, trial=ti, seed=seed)
    return gi, rec


def _aggregate(value, eps, alpha, gamma1, lam, f_star, records, trials) -> GridPoint:
    finite = np.array([r.t_x for r in records if not r.censored], dtype=float)
    censored = sum(1 for r in records if r.censored)
    if finite.size:
        mean_T = float(np.mean(finite))
        median_T = float(np.median(finite))
        ci = 1.96 * float(np.std(finite, ddof=1)) / math.sqrt(finite.size) \
            if finite.size > 1 else 0.0
    else:
        mean_T = median_T = ci = float("nan")
    return GridPoint(value=value, epsilon=eps, alpha=alpha, gamma1=gamma1,
                     lam=lam, f_star=f_star, records=tuple(records),
                     mean_T=mean_T, median_T=median_T, ci95_half=ci,
                     censored_count=censored, flagged=censored > trials / 2)


def run_sweep(spec: ExperimentSpec) -> SweepResult:
    """Run `spec.trials` independent hitting-time trials per grid value.

    Trials are embarrassingly parallel; aggregation is a deterministic reduce
    ordered by (grid index, trial index), so thread count never changes the
    result."""
    param_name = {"StepsizeSweep": "epsilon" if spec.grid_is_epsilon else "s",
                  "AlphaSweep": "alpha",
                  "Gamma1Sweep": "gamma1",
                  "Gamma1EqAlphaSqSweep": "gamma1"}[spec.sweep_kind.value]
    resolved = []
    tasks = []
    for gi, value in enumerate(spec.grid):
        eps, alpha, gamma1, lam = _resolve_grid_point(spec, value)
        f = make_objective(spec.objective_kind, lam)
        if spec.objective_kind == "cubic_reg_quadratic":
            imin = int(np.argmin(lam))
            start = np.zeros(f.dim)
            start[imin] = (2.0 / 3.0) * abs(lam[imin])
        else:
            start = np.ones(f.dim)
        _, f_star = find_local_minimum(f, start)
        resolved.append((value, eps, alpha, gamma1, lam, f_star))
        for ti in range(spec.trials):
            tasks.append((spec.objective_kind, lam, eps, alpha, spec.sigma1,
                          spec.sigma2, spec.initial_center, spec.jitter_radius,
                          f_star, spec.threshold_C, spec.max_steps,
                          spec.master_seed, gi, ti))

    threads = spec.threads or os.cpu_count() or 1
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=4))
    else:
        results = [_run_trial(t) for t in tasks]

    by_grid: dict[int, list] = {gi: [] for gi in range(len(spec.grid))}
    for gi, rec in results:
        by_grid[gi].append(rec)
    points = tuple(
        _aggregate(*resolved[gi], sorted(by_grid[gi], key=lambda r: r.trial),
                   spec.trials)
        for gi in range(len(spec.grid))
    )
    return SweepResult(spec=spec, sweep_param=param_name, points=points)


# ---------------------------------------------------------------------------
# fits and theory comparison

def loglog_fit(xs, ys) -> RegressionResult:
    """Ordinary least squares of ln(ys) on ln(xs)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 3:
        raise ValueError("need >= 3 paired points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("all entries must be positive")
    fit = linregress(np.log(xs), np.log(ys))
    return RegressionResult(slope=float(fit.slope), intercept=float(fit.intercept),
                            stderr_slope=float(fit.stderr),
                            r2=float(fit.rvalue) ** 2, n_points=xs.size)


def compare_to_theory(result: SweepResult) -> dict:
    """Report the empirical ratio E T_x / (eps^-1 ln eps^-1) per stepsize-grid
    point against the predicted rate constant.  The prediction is a one-sided
    (upper) bound, so 'bounded' means the empirical ratio does not exceed it
    beyond its confidence half-width at the smallest stepsize."""
    if result.spec.sweep_kind is not SweepKind.STEPSIZE:
        raise ValueError("compare_to_theory needs a StepsizeSweep result")
    spec = result.spec
    rows = []
    for p in result.points:
        scale = (1.0 / p.epsilon) * math.log(1.0 / p.epsilon)
        rows.append({
            "value": p.value,
            "epsilon": p.epsilon,
            "ratio_mean": p.mean_T / scale,
            "ratio_ci95_half": p.ci95_half / scale,
        })
    gamma1 = result.points[0].gamma1
    alpha = result.points[0].alpha
    prediction = predicted_exit_rate(spec.saddle_chain_k, gamma1, alpha)
    lne = np.log([p.epsilon for p in result.points])
    ratios = np.array([r["ratio_mean"] for r in rows])
    trend = linregress(lne, ratios)
    smallest = min(rows, key=lambda r: r["epsilon"])
    return {
        "k": spec.saddle_chain_k,
        "gamma1": gamma1,
        "alpha": alpha,
        "predicted_rate": prediction,
        "points": rows,
        "ratio_trend_slope_vs_ln_eps": float(trend.slope),
        "bounded": bool(smallest["ratio_mean"] - smallest["ratio_ci95_half"]
                        <= prediction),
    }


# ---------------------------------------------------------------------------
# CSV output

def _atomic_write(path, write_fn):
    """Write via temp file + rename so interrupted runs leave no partial file."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".",
                               prefix=".tmp_", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _g17(x) -> str:
    return f"{x:.17g}"


def write_trials_csv(result: SweepResult, path):
    def write(fh):
        w = csv.writer(fh)
        w.writerow(["sweep_param", "value", "trial", "seed", "T_x", "censored", "steps"])
        for p in result.points:
            for r in p.records:
                w.writerow([result.sweep_param, _g17(p.value), r.trial, r.seed,
                            "" if r.censored else _g17(r.t_x),
                            int(r.censored), r.steps])
    _atomic_write(path, write)


def write_summary_csv(result: SweepResult, path):
    def write(fh):
        w = csv.writer(fh)
        w.writerow(["sweep_param", "value", "epsilon", "alpha", "gamma1",
                    "n_trials", "censored_count", "flagged",
                    "mean_T", "median_T", "ci95_half", "f_star"])
        for p in result.points:
            w.writerow([result.sweep_param, _g17(p.value), _g17(p.epsilon),
                        _g17(p.alpha), _g17(p.gamma1), len(p.records),
                        p.censored_count, int(p.flagged), _g17(p.mean_T),
                        _g17(p.median_T), _g17(p.ci95_half), _g17(p.f_star)])
    _atomic_write(path, write)
