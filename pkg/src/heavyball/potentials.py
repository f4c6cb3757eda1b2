"""Objective functions (value/gradient/Hessian) and saddle classification.

Convention note: the cubic-regularized family uses f(x) = x'Lx + |x|^3
*without* the 1/2 factor on the quadratic term, so its Hessian at the origin
is 2L.  The plain quadratic family keeps the 1/2: f(x) = x'Lx/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.linalg import eigh

__all__ = [
    "ObjectiveFunction",
    "QuadraticSpec",
    "CubicRegularizedQuadraticSpec",
    "SaddleClassParams",
    "PointClass",
    "PointTag",
    "StrongSaddleReport",
    "make_quadratic",
    "make_cubic_regularized",
    "classify_point",
    "check_strong_saddle",
]

#: position must be this close to a critical point for Hessian-only checks
CRITICAL_POINT_TOL = 1e-8

#: below this radius the cubic Hessian switches to its x=0 limit
_CUBIC_ORIGIN_TOL = 1e-14


@dataclass(frozen=True)
class ObjectiveFunction:
    """A smooth objective on R^d with analytic gradient and Hessian.

    Instances are immutable and evaluation is pure, so they are safe to
    share across concurrent Monte Carlo workers.
    """

    dim: int
    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    #: diagonal of the quadratic part when the function belongs to one of the
    #: built-in diagonal families; lets the fast simulation kernel recognize it
    lam: np.ndarray | None = None
    kind: str = "generic"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")


def _as_lambda(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("lambda must be a non-empty 1-D array")
    if np.any(lam == 0.0):
        raise ValueError("every lambda entry must be nonzero")
    return lam


@dataclass(frozen=True)
class QuadraticSpec:
    """Diagonal quadratic f(x) = x'Lx/2 with L = diag(lam)."""

    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", _as_lambda(self.lam))


@dataclass(frozen=True)
class CubicRegularizedQuadraticSpec:
    """Cubic-regularized quadratic f(x) = x'Lx + |x|^3 with L = diag(lam)."""

    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", _as_lambda(self.lam))


def make_quadratic(spec: QuadraticSpec) -> ObjectiveFunction:
    """f(x) = sum_i lam_i x_i^2 / 2, grad = lam*x, hess = diag(lam)."""
    lam = spec.lam
    d = lam.size
    H = np.diag(lam)

    def f(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(lam @ (x * x))

    def g(x):
        return lam * np.asarray(x, dtype=float)

    def h(x):
        return H.copy()

    return ObjectiveFunction(dim=d, eval=f, grad=g, hess=h, lam=lam,
                             kind="quadratic")


def make_cubic_regularized(spec: CubicRegularizedQuadraticSpec) -> ObjectiveFunction:
    """f(x) = x'Lx + |x|^3 with L = diag(lam).

    grad = 2Lx + 3|x|x;  hess = 2L + 3|x|I + 3 xx'/|x|  (x != 0),
    hess(0) = 2L.  Note the Hessian at the origin is 2L, not L.
    """
    lam = spec.lam
    d = lam.size

    def f(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x)
        return float(lam @ (x * x)) + r ** 3

    def g(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x)
        return 2.0 * lam * x + 3.0 * r * x

    def h(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x)
        H = np.diag(2.0 * lam)
        if r >= _CUBIC_ORIGIN_TOL:
            H += 3.0 * r * np.eye(d) + 3.0 * np.outer(x, x) / r
        return H

    return ObjectiveFunction(dim=d, eval=f, grad=g, hess=h, lam=lam,
                             kind="cubic_reg_quadratic")


@dataclass(frozen=True)
class SaddleClassParams:
    """Thresholds of the strict/strong saddle classification."""

    gamma1: float
    gamma2: float
    gamma3: float = 0.0

    def __post_init__(self):
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("gamma1 and gamma2 must be strictly positive")
        if self.gamma3 < 0:
            raise ValueError("gamma3 must be nonnegative")


class PointTag(Enum):
    LARGE_GRADIENT = "LargeGradient"
    STRICT_SADDLE_REGION = "StrictSaddleRegion"
    STRONG_CONVEX_REGION = "StrongConvexRegion"
    VIOLATION = "Violation"


@dataclass(frozen=True)
class PointClass:
    tag: PointTag
    min_eigenvalue: float
    grad_norm: float


def min_eigenvalue(H: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix via LAPACK eigh."""
    return float(eigh(H, eigvals_only=True, subset_by_index=[0, 0])[0])


def classify_point(f: ObjectiveFunction, x, params: SaddleClassParams) -> PointClass:
    """Place x into one of the three strict-saddle cases, or Violation.

    Violation means the function fails the strict saddle property at x
    with the supplied thresholds; it is data, not an error.
    """
    x = np.asarray(x, dtype=float)
    gnorm = float(np.linalg.norm(f.grad(x)))
    lmin = min_eigenvalue(f.hess(x))
    if gnorm > params.gamma2:
        tag = PointTag.LARGE_GRADIENT
    elif lmin <= -params.gamma1:
        tag = PointTag.STRICT_SADDLE_REGION
    elif lmin >= params.gamma1:
        tag = PointTag.STRONG_CONVEX_REGION
    else:
        tag = PointTag.VIOLATION
    return PointClass(tag=tag, min_eigenvalue=lmin, grad_norm=gnorm)


@dataclass(frozen=True)
class StrongSaddleReport:
    is_strong: bool
    eigenvalues: np.ndarray  # sorted ascending
    gamma3: float


def check_strong_saddle(f: ObjectiveFunction, x, gamma3: float) -> StrongSaddleReport:
    """At a critical point x, check |eigenvalue| >= gamma3 for every Hessian
    eigenvalue.  Rejects points that are not critical to within 1e-8."""
    x = np.asarray(x, dtype=float)
    gnorm = float(np.linalg.norm(f.grad(x)))
    if gnorm > CRITICAL_POINT_TOL:
        raise ValueError(
            f"not a critical point: |grad| = {gnorm:.3e} > {CRITICAL_POINT_TOL:.0e}"
        )
    evals = np.sort(eigh(f.hess(x), eigvals_only=True))
    return StrongSaddleReport(
        is_strong=bool(np.all(np.abs(evals) >= gamma3)),
        eigenvalues=evals,
        gamma3=float(gamma3),
    )
