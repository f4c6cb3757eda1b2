"""Constructive eigen-analysis of the linearized dissipative flow at a saddle.

Each Hessian eigenpair (lambda_i, xi_i) lifts to a 2x2 invariant block of the
2d x 2d matrix A = [[0, I], [-hess, -alpha I]] with eigenvalues
mu_i^{+/-} = (-alpha +/- sqrt(alpha^2 - 4 lambda_i)) / 2, falling into one of
four cases depending on the sign of the discriminant.  The module also exposes
the predicted first-hitting-time rate constants built from these eigenvalues.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh

__all__ = [
    "BlockTag",
    "EigenBlockCase",
    "SaddleSpectrum",
    "ZeroEigenvalueError",
    "NoUnstableDirectionError",
    "mu_pair",
    "mu0",
    "saddle_eigensystem",
    "block_diagonal",
    "predicted_exit_rate",
    "exit_time_bound",
]

#: |lambda| below this is treated as a zero Hessian eigenvalue (not strong)
ZERO_EIG_TOL = 1e-10

#: relative half-width of the critically damped band around lambda = alpha^2/4
CRITICAL_BAND_TOL = 1e-9


class ZeroEigenvalueError(ValueError):
    """Hessian has a (numerically) zero eigenvalue: not a strong saddle."""


class NoUnstableDirectionError(ValueError):
    """All Hessian eigenvalues are positive: a minimum, not a saddle."""


class BlockTag(Enum):
    REAL_UNSTABLE = "RealUnstable"              # lambda < 0
    REAL_STABLE_DISTINCT = "RealStableDistinct"  # 0 < lambda < alpha^2/4
    CRITICALLY_DAMPED = "CriticallyDamped"       # lambda = alpha^2/4
    COMPLEX_CONJUGATE = "ComplexConjugate"       # lambda > alpha^2/4


@dataclass(frozen=True)
class EigenBlockCase:
    tag: BlockTag
    lam: float
    mu_plus: complex
    mu_minus: complex


@dataclass(frozen=True)
class SaddleSpectrum:
    """Eigenstructure of A at a strong saddle.

    blocks are ordered by ascending Hessian eigenvalue; columns of `basis`
    come in pairs (u_i^+, u_i^-) in the same order, with the generalized
    eigenvector in the minus slot for critically damped blocks.
    """

    d: int
    blocks: tuple[EigenBlockCase, ...]
    k: int            # saddle index: number of negative Hessian eigenvalues
    mu0: float        # largest unstable growth rate
    basis: np.ndarray  # 2d x 2d complex matrix P
    condition_number: float


def _is_critical(lam: float, alpha: float) -> bool:
    return abs(lam - alpha * alpha / 4.0) <= CRITICAL_BAND_TOL * max(1.0, alpha * alpha)


def mu_pair(lam: float, alpha: float) -> tuple[complex, complex]:
    """Both roots of mu^2 + alpha*mu + lam = 0; the first has the larger real
    part.  Real roots are returned with exactly zero imaginary part."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    disc = alpha * alpha - 4.0 * lam
    if disc >= 0.0:
        root = math.sqrt(disc)
        return complex((-alpha + root) / 2.0), complex((-alpha - root) / 2.0)
    root = cmath.sqrt(complex(disc))
    return (-alpha + root) / 2.0, (-alpha - root) / 2.0


def mu0(lambda1: float, alpha: float) -> float:
    """Positive root (-alpha + sqrt(alpha^2 - 4*lambda1)) / 2 for lambda1 < 0."""
    if lambda1 >= 0:
        raise ValueError("lambda1 must be negative (unstable direction)")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return (-alpha + math.sqrt(alpha * alpha - 4.0 * lambda1)) / 2.0


def _classify(lam: float, alpha: float) -> EigenBlockCase:
    if _is_critical(lam, alpha):
        m = complex(-alpha / 2.0)
        return EigenBlockCase(BlockTag.CRITICALLY_DAMPED, lam, m, m)
    mp, mm = mu_pair(lam, alpha)
    if lam < 0:
        tag = BlockTag.REAL_UNSTABLE
    elif lam < alpha * alpha / 4.0:
        tag = BlockTag.REAL_STABLE_DISTINCT
    else:
        tag = BlockTag.COMPLEX_CONJUGATE
    return EigenBlockCase(tag, lam, mp, mm)


def saddle_eigensystem(hess: np.ndarray, alpha: float) -> SaddleSpectrum:
    """Block-diagonalize A = [[0, I], [-hess, -alpha I]] at a strong saddle.

    Raises ZeroEigenvalueError if any |lambda_i| < 1e-10 and
    NoUnstableDirectionError if no lambda_i is negative.
    """
    hess = np.asarray(hess, dtype=float)
    if hess.ndim != 2 or hess.shape[0] != hess.shape[1]:
        raise ValueError("hess must be a square matrix")
    if not np.allclose(hess, hess.T, atol=1e-10):
        raise ValueError("hess must be symmetric")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    d = hess.shape[0]
    lams, xis = eigh(hess)  # ascending eigenvalues, orthonormal columns
    if np.any(np.abs(lams) < ZERO_EIG_TOL):
        raise ZeroEigenvalueError(f"|lambda| < {ZERO_EIG_TOL:g}: not a strong saddle")
    k = int(np.sum(lams < 0.0))
    if k == 0:
        raise NoUnstableDirectionError("all Hessian eigenvalues positive: a minimum")

    blocks = []
    P = np.zeros((2 * d, 2 * d), dtype=complex)
    for i in range(d):
        lam = float(lams[i])
        xi = xis[:, i]
        block = _classify(lam, alpha)
        blocks.append(block)
        u_plus = np.concatenate([xi, block.mu_plus * xi])
        if block.tag is BlockTag.CRITICALLY_DAMPED:
            # Jordan chain: (A - mu I) a = u_plus has the exact solution
            # a = (0, xi), since mu = -alpha/2 and lambda = alpha^2/4.
            u_minus = np.concatenate([np.zeros(d), xi]).astype(complex)
        else:
            u_minus = np.concatenate([xi, block.mu_minus * xi])
        P[:, 2 * i] = u_plus
        P[:, 2 * i + 1] = u_minus

    return SaddleSpectrum(
        d=d,
        blocks=tuple(blocks),
        k=k,
        mu0=mu0(float(lams[0]), alpha),
        basis=P,
        condition_number=float(np.linalg.cond(P)),
    )


def block_diagonal(spectrum: SaddleSpectrum) -> np.ndarray:
    """The 2d x 2d block-diagonal matrix diag(A_1, ..., A_d) matching `basis`."""
    d = spectrum.d
    B = np.zeros((2 * d, 2 * d), dtype=complex)
    for i, blk in enumerate(spectrum.blocks):
        j = 2 * i
        B[j, j] = blk.mu_plus
        B[j + 1, j + 1] = blk.mu_minus
        if blk.tag is BlockTag.CRITICALLY_DAMPED:
            B[j, j + 1] = 1.0
    return B


def predicted_exit_rate(k: int, gamma1: float, alpha: float) -> float:
    """k * (sqrt(alpha^2 + 4*gamma1) + alpha) / (4*gamma1): the predicted
    coefficient of (1/eps) * ln(1/eps) in the mean hitting time through a
    chain of k saddles."""
    if k <= 0 or gamma1 <= 0 or alpha <= 0:
        raise ValueError("k, gamma1 and alpha must all be positive")
    return k * (math.sqrt(alpha * alpha + 4.0 * gamma1) + alpha) / (4.0 * gamma1)


def exit_time_bound(spectrum: SaddleSpectrum, epsilon: float) -> float:
    """ln(1/eps) / (2*mu0): predicted mean exit time from one saddle
    neighborhood, in rescaled (continuous) time units."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    return math.log(1.0 / epsilon) / (2.0 * spectrum.mu0)
