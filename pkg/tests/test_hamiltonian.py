"""Energy, skew gradient, linearization, and dissipation-identity tests."""
import numpy as np
import pytest

from heavyball import (
    FrictionParams,
    PhasePoint,
    QuadraticSpec,
    dissipation_residual,
    drift,
    hamiltonian,
    jacobi_matrix,
    make_quadratic,
    rk4_step,
    skew_gradient,
)
from heavyball.potentials import CubicRegularizedQuadraticSpec, make_cubic_regularized


def _rand_state(rng, d):
    return PhasePoint(rng.standard_normal(d), rng.standard_normal(d))


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint(np.zeros(2), np.zeros(3))
    p = PhasePoint([1.0, 2.0], [3.0, 4.0])
    assert p.dim == 2
    assert np.array_equal(p.as_vector(), [1.0, 2.0, 3.0, 4.0])


def test_friction_validation():
    with pytest.raises(ValueError):
        FrictionParams(alpha=0.0)


def test_hamiltonian_value():
    f = make_quadratic(QuadraticSpec([2.0, 1.0]))
    p = PhasePoint([1.0, 1.0], [2.0, 0.0])
    assert hamiltonian(f, p) == pytest.approx(2.0 + 1.5)


def test_skew_gradient_orthogonal_to_gradient():
    """(V, -grad f) is orthogonal to grad H = (grad f, V) at every state."""
    rng = np.random.default_rng(21)
    for _ in range(200):
        d = int(rng.integers(1, 7))
        lam = rng.uniform(0.5, 4.0, d) * rng.choice([-1.0, 1.0], d)
        f = make_cubic_regularized(CubicRegularizedQuadraticSpec(lam))
        p = _rand_state(rng, d)
        grad_h = np.concatenate([f.grad(p.X), p.V])
        scale = max(1.0, np.linalg.norm(grad_h) ** 2)
        assert abs(skew_gradient(f, p) @ grad_h) <= 1e-12 * scale


def test_drift_is_skew_gradient_minus_friction():
    rng = np.random.default_rng(22)
    f = make_quadratic(QuadraticSpec([1.0, -2.0, 3.0]))
    fr = FrictionParams(alpha=1.7)
    p = _rand_state(rng, 3)
    expected = skew_gradient(f, p)
    expected[3:] -= fr.alpha * p.V
    assert np.allclose(drift(f, p, fr), expected)


def test_energy_nonincreasing_along_deterministic_flow():
    f = make_cubic_regularized(CubicRegularizedQuadraticSpec([2.0, 1.0, -1.0]))
    x = np.array([0.4, -0.3, 0.2])
    v = np.array([0.1, 0.0, -0.2])
    h = 1e-3
    energies = []
    for _ in range(5000):
        energies.append(hamiltonian(f, PhasePoint(x, v)))
        x, v = rk4_step(f, x, v, alpha=1.0, h=h)
    diffs = np.diff(energies)
    assert np.all(diffs <= 1e-12)


def test_jacobi_matrix_matches_fd_jacobian_of_drift():
    f = make_quadratic(QuadraticSpec([3.0, -2.0]))
    fr = FrictionParams(alpha=1.3)
    A = jacobi_matrix(f, np.zeros(2), fr).entries
    h = 1e-6
    J = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        plus = drift(f, PhasePoint(e[:2], e[2:]), fr)
        minus = drift(f, PhasePoint(-e[:2], -e[2:]), fr)
        J[:, j] = (plus - minus) / (2 * h)
    assert np.max(np.abs(A - J)) <= 1e-5


def test_jacobi_matrix_rejects_non_critical_point():
    f = make_quadratic(QuadraticSpec([1.0, 1.0]))
    with pytest.raises(ValueError, match="critical"):
        jacobi_matrix(f, np.array([0.5, 0.0]), FrictionParams(alpha=1.0))


def _sampled_trajectory(f, x, v, alpha, h, n):
    traj = [(0.0, PhasePoint(x, v))]
    for i in range(1, n + 1):
        x, v = rk4_step(f, x, v, alpha, h)
        traj.append((i * h, PhasePoint(x, v)))
    return traj


def test_dissipation_residual_shrinks_with_step():
    """The residual of Delta H = -alpha int |V|^2 is quadrature-dominated,
    so halving h should cut it by about 4x."""
    f = make_quadratic(QuadraticSpec([2.0, 5.0]))
    x0 = np.array([1.0, -0.5])
    v0 = np.array([0.0, 0.3])
    alpha = 0.8
    r_h = dissipation_residual(f, _sampled_trajectory(f, x0, v0, alpha, 2e-3, 2500), alpha)
    r_h2 = dissipation_residual(f, _sampled_trajectory(f, x0, v0, alpha, 1e-3, 5000), alpha)
    assert r_h2 < 1e-6
    assert r_h / r_h2 >= 3.5


def test_dissipation_residual_needs_two_samples():
    f = make_quadratic(QuadraticSpec([1.0]))
    with pytest.raises(ValueError):
        dissipation_residual(f, [(0.0, PhasePoint([1.0], [0.0]))], 1.0)
