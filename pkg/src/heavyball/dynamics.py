"""Time steppers for the heavy-ball iteration and its SDE limit.

Clock conventions:

* `heavy_ball_step` / `stochastic_heavy_ball_step` advance the discrete
  iteration with stepsize-like parameter eps; one call is one iteration.
* `sde_step_euler_maruyama` advances the time-rescaled SDE
  dX = V dt + sqrt(eps) s1 dW1,  dV = (-alpha V - grad f) dt + sqrt(eps) s2 dW2
  by a step h of rescaled time.  With h = eps and no position noise the two
  updates coincide term by term.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .hamiltonian import PhasePoint
from .potentials import ObjectiveFunction

__all__ = [
    "DynamicsParams",
    "IntegratorConfig",
    "Scheme",
    "Termination",
    "Trajectory",
    "heavy_ball_step",
    "stochastic_heavy_ball_step",
    "sde_step_euler_maruyama",
    "rk4_step",
    "simulate",
    "linear_sde_exact_1d",
]


def _as_noise_factor(sigma, d: int) -> np.ndarray | None:
    """Normalize a noise factor: None, scalar (meaning s*I), or d x d matrix."""
    if sigma is None:
        return None
    if np.isscalar(sigma):
        return float(sigma) * np.eye(d)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (d, d):
        raise ValueError(f"noise factor must be scalar or {d}x{d}, got {sigma.shape}")
    return sigma


@dataclass(frozen=True)
class DynamicsParams:
    """Friction, stepsize/noise-intensity parameter, and noise factors.

    sigma1/sigma2 accept a scalar s as shorthand for s*I.  sigma1=None means
    no position noise (the default, matching the simplified analysis where
    only the velocity iteration is noisy).
    """

    alpha: float
    epsilon: float
    dim: int
    sigma1: np.ndarray | float | None = None
    sigma2: np.ndarray | float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        object.__setattr__(self, "sigma1", _as_noise_factor(self.sigma1, self.dim))
        s2 = _as_noise_factor(self.sigma2, self.dim)
        if s2 is None:
            raise ValueError("sigma2 may not be None")
        object.__setattr__(self, "sigma2", s2)

    def isotropic_scales(self) -> tuple[float, float] | None:
        """(s1, s2) if both factors are scalar multiples of the identity
        (s1 = 0 for sigma1=None), else None.  Used to route the hitting-time
        loop through the compiled kernel."""
        def scale(m):
            if m is None:
                return 0.0
            s = m[0, 0]
            if np.array_equal(m, s * np.eye(self.dim)):
                return float(s)
            return None

        s1 = scale(self.sigma1)
        s2 = scale(self.sigma2)
        if s1 is None or s2 is None:
            return None
        return s1, s2


class Scheme(Enum):
    EULER_MARUYAMA = "EulerMaruyama"
    RK4_DETERMINISTIC = "RK4Deterministic"


class Termination(Enum):
    STOPPING_CONDITION = "StoppingCondition"
    MAX_STEPS = "MaxSteps"


@dataclass(frozen=True)
class IntegratorConfig:
    step: float
    max_steps: int
    seed: int = 0
    scheme: Scheme = Scheme.EULER_MARUYAMA

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled path: times[i] pairs with (xs[i], vs[i])."""

    times: np.ndarray     # (n,)
    xs: np.ndarray        # (n, d)
    vs: np.ndarray        # (n, d)
    terminated_by: Termination

    def __len__(self) -> int:
        return self.times.size

    def state(self, i: int) -> PhasePoint:
        return PhasePoint(self.xs[i], self.vs[i])

    def samples(self):
        return [(float(self.times[i]), self.state(i)) for i in range(len(self))]

    def to_csv(self, path, stride: int = 1):
        """Write `t,x_0..x_{d-1},v_0..v_{d-1}` rows at the given stride."""
        d = self.xs.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"x_{j}" for j in range(d)] + [f"v_{j}" for j in range(d)])
            for i in range(0, len(self), stride):
                row = [self.times[i], *self.xs[i], *self.vs[i]]
                w.writerow([f"{val:.17g}" for val in row])


def _check_momentum(alpha: float, eps: float):
    if alpha * eps >= 1.0:
        raise ValueError(
            f"alpha*eps = {alpha * eps:g} >= 1: momentum coefficient leaves [0, 1]"
        )


def heavy_ball_step(f: ObjectiveFunction, state, epsilon: float, alpha: float):
    """One deterministic heavy-ball iteration: the velocity update uses the
    old position's gradient, then the position moves with the new velocity."""
    _check_momentum(alpha, epsilon)
    x, v = state
    v1 = (1.0 - alpha * epsilon) * v - epsilon * f.grad(x)
    x1 = x + epsilon * v1
    return x1, v1


def stochastic_heavy_ball_step(f: ObjectiveFunction, state, params: DynamicsParams,
                               rng: np.random.Generator):
    """One stochastic heavy-ball iteration with unbiased Gaussian noise in the
    gradient (factor sigma2) and, optionally, the position update (sigma1).
    Position noise is injected after the velocity update."""
    _check_momentum(params.alpha, params.epsilon)
    x, v = state
    eps = params.epsilon
    xi2 = rng.standard_normal(f.dim)
    v1 = (1.0 - params.alpha * eps) * v - eps * (f.grad(x) + params.sigma2 @ xi2)
    if params.sigma1 is not None:
        xi1 = rng.standard_normal(f.dim)
        x1 = x + eps * (v1 + params.sigma1 @ xi1)
    else:
        x1 = x + eps * v1
    return x1, v1


def sde_step_euler_maruyama(f: ObjectiveFunction, state, params: DynamicsParams,
                            h: float, rng: np.random.Generator):
    """Euler-Maruyama step of the time-rescaled SDE with noise sqrt(eps*h).

    The velocity is updated first and the position moves with the updated
    velocity, so that with h = eps and sigma1 = None the step reproduces the
    discrete heavy-ball update exactly, draw for draw.
    """
    if h <= 0:
        raise ValueError("h must be > 0")
    x, v = state
    amp = np.sqrt(params.epsilon * h)
    v1 = v + h * (-params.alpha * v - f.grad(x))
    v1 += amp * (params.sigma2 @ rng.standard_normal(f.dim))
    x1 = x + h * v1
    if params.sigma1 is not None:
        x1 += amp * (params.sigma1 @ rng.standard_normal(f.dim))
    return x1, v1


def rk4_step(f: ObjectiveFunction, x, v, alpha: float, h: float):
    """Classical RK4 step of the deterministic dissipative flow."""
    def rhs(xx, vv):
        return vv, -alpha * vv - f.grad(xx)

    k1x, k1v = rhs(x, v)
    k2x, k2v = rhs(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
    k3x, k3v = rhs(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
    k4x, k4v = rhs(x + h * k3x, v + h * k3v)
    x1 = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
    v1 = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x1, v1


def simulate(f: ObjectiveFunction, initial: PhasePoint, params: DynamicsParams,
             config: IntegratorConfig, stop=None, stride: int = 1) -> Trajectory:
    """Drive the configured stepper until `stop(t, state)` or max_steps.

    Every `stride`-th sample (plus the final one) is recorded.  With a fixed
    seed the trajectory is bit-identical across runs.
    """
    if initial.dim != f.dim:
        raise ValueError("dimension mismatch between objective and initial state")
    rng = np.random.default_rng(config.seed)
    h = config.step
    x = initial.X.copy()
    v = initial.V.copy()
    times = [0.0]
    xs = [x.copy()]
    vs = [v.copy()]
    terminated = Termination.MAX_STEPS
    if stop is not None and stop(0.0, PhasePoint(x, v)):
        return Trajectory(np.array(times), np.array(xs), np.array(vs),
                          Termination.STOPPING_CONDITION)
    for n in range(1, config.max_steps + 1):
        if config.scheme is Scheme.RK4_DETERMINISTIC:
            x, v = rk4_step(f, x, v, params.alpha, h)
        else:
            x, v = sde_step_euler_maruyama(f, (x, v), params, h, rng)
        t = n * h
        hit = stop is not None and stop(t, PhasePoint(x, v))
        if n % stride == 0 or hit or n == config.max_steps:
            times.append(t)
            xs.append(x.copy())
            vs.append(v.copy())
        if hit:
            terminated = Termination.STOPPING_CONDITION
            break
    return Trajectory(np.array(times), np.array(xs), np.array(vs), terminated)


def linear_sde_exact_1d(lambda1: float, alpha: float, sigma: float, t_grid,
                        rng: np.random.Generator, x0: float = 0.0, v0: float = 0.0,
                        n_paths: int = 1) -> np.ndarray:
    """Sample the exact solution of  x'' + alpha x' + lambda1 x = sigma dW/dt
    on t_grid, for lambda1 < 0 (real roots mu- < 0 < mu+).

    The two Ito integrals in the explicit solution are advanced with exact
    jointly-Gaussian increments (their covariance over each grid interval is
    available in closed form), so the marginals are exact at every grid time.
    Returns an array of shape (n_paths, len(t_grid)).
    """
    if lambda1 >= 0:
        raise ValueError("lambda1 must be negative")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be 1-D strictly increasing")
    mp = (-alpha + np.sqrt(alpha * alpha - 4.0 * lambda1)) / 2.0
    mm = (-alpha - np.sqrt(alpha * alpha - 4.0 * lambda1)) / 2.0
    dmu = mp - mm
    c1 = (v0 - mm * x0) / dmu
    c2 = (mp * x0 - v0) / dmu

    def exp_int(c, a, b):
        # integral of e^{c u} du over [a, b]
        if c == 0.0:
            return b - a
        return (np.exp(c * b) - np.exp(c * a)) / c

    ip = np.zeros(n_paths)  # int_0^t e^{-mu+ s} dW
    im = np.zeros(n_paths)  # int_0^t e^{-mu- s} dW
    out = np.empty((n_paths, t_grid.size))
    prev = 0.0
    for j, t in enumerate(t_grid):
        if t > prev:
            vp = exp_int(-2.0 * mp, prev, t)
            vm = exp_int(-2.0 * mm, prev, t)
            cov = exp_int(-(mp + mm), prev, t)
            l11 = np.sqrt(vp)
            l21 = cov / l11
            l22 = np.sqrt(max(vm - l21 * l21, 0.0))
            z = rng.standard_normal((n_paths, 2))
            ip += l11 * z[:, 0]
            im += l21 * z[:, 0] + l22 * z[:, 1]
            prev = t
        out[:, j] = (np.exp(mp * t) * (c1 + sigma * ip / dmu)
                     + np.exp(mm * t) * (c2 - sigma * im / dmu))
    return out
