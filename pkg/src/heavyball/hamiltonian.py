"""Phase-space view of the dissipative oscillator.

State is Y = (X, V) in R^{2d}.  Energy H(X,V) = |V|^2/2 + f(X) decays along
the deterministic flow at rate alpha*|V|^2; dissipation_residual measures how
well a sampled trajectory honors that identity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .potentials import CRITICAL_POINT_TOL, ObjectiveFunction

__all__ = [
    "PhasePoint",
    "FrictionParams",
    "JacobiMatrix",
    "hamiltonian",
    "skew_gradient",
    "drift",
    "jacobi_matrix",
    "dissipation_residual",
]


@dataclass(frozen=True)
class PhasePoint:
    """Position-velocity pair; both components have the same dimension."""

    X: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        X = np.atleast_1d(np.asarray(self.X, dtype=float))
        V = np.atleast_1d(np.asarray(self.V, dtype=float))
        if X.shape != V.shape or X.ndim != 1:
            raise ValueError(f"X and V must be 1-D of equal length, got {X.shape} and {V.shape}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "V", V)

    @property
    def dim(self) -> int:
        return self.X.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.X, self.V])


@dataclass(frozen=True)
class FrictionParams:
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("friction constant alpha must be > 0")


@dataclass(frozen=True)
class JacobiMatrix:
    """Linearization [[0, I], [-hess, -alpha I]] of the flow at a critical point."""

    entries: np.ndarray
    d: int


def _check_dim(f: ObjectiveFunction, p: PhasePoint):
    if p.dim != f.dim:
        raise ValueError(f"dimension mismatch: objective is {f.dim}-d, state is {p.dim}-d")


def hamiltonian(f: ObjectiveFunction, p: PhasePoint) -> float:
    """H(X, V) = |V|^2/2 + f(X)."""
    _check_dim(f, p)
    return 0.5 * float(p.V @ p.V) + f.eval(p.X)


def skew_gradient(f: ObjectiveFunction, p: PhasePoint) -> np.ndarray:
    """Skew gradient (dH/dV, -dH/dX) = (V, -grad f(X)); orthogonal to grad H."""
    _check_dim(f, p)
    return np.concatenate([p.V, -f.grad(p.X)])


def drift(f: ObjectiveFunction, p: PhasePoint, fr: FrictionParams) -> np.ndarray:
    """Full deterministic vector field (V, -alpha V - grad f(X))."""
    _check_dim(f, p)
    return np.concatenate([p.V, -fr.alpha * p.V - f.grad(p.X)])


def jacobi_matrix(f: ObjectiveFunction, x0, fr: FrictionParams) -> JacobiMatrix:
    """Assemble the 2d x 2d linearization at a critical position x0."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    gnorm = float(np.linalg.norm(f.grad(x0)))
    if gnorm > CRITICAL_POINT_TOL:
        raise ValueError(f"x0 is not a critical point: |grad| = {gnorm:.3e}")
    d = f.dim
    A = np.zeros((2 * d, 2 * d))
    A[:d, d:] = np.eye(d)
    A[d:, :d] = -f.hess(x0)
    A[d:, d:] = -fr.alpha * np.eye(d)
    return JacobiMatrix(entries=A, d=d)


def dissipation_residual(f: ObjectiveFunction, trajectory, alpha: float) -> float:
    """|Delta H + alpha * int |V|^2 dt| along a uniformly sampled trajectory.

    Zero (up to integrator and quadrature error) for exact solutions of the
    deterministic flow.  `trajectory` is a sequence of (t, PhasePoint); the
    integral uses Simpson's rule so the quadrature error is O(h^4) and does
    not mask a fourth-order integrator.
    """
    if len(trajectory) < 2:
        raise ValueError("need at least 2 samples")
    times = np.array([t for t, _ in trajectory])
    vsq = np.array([float(p.V @ p.V) for _, p in trajectory])
    h_start = hamiltonian(f, trajectory[0][1])
    h_end = hamiltonian(f, trajectory[-1][1])
    return abs(h_end - h_start + alpha * simpson(vsq, x=times))
