"""Stochastic heavy-ball dynamics, saddle-point spectra, and
first-hitting-time experiments."""

from ._kernels import BACKEND
from .potentials import (
    CubicRegularizedQuadraticSpec,
    ObjectiveFunction,
    PointClass,
    PointTag,
    QuadraticSpec,
    SaddleClassParams,
    check_strong_saddle,
    classify_point,
    make_cubic_regularized,
    make_quadratic,
)
from .hamiltonian import (
    FrictionParams,
    JacobiMatrix,
    PhasePoint,
    dissipation_residual,
    drift,
    hamiltonian,
    jacobi_matrix,
    skew_gradient,
)
from .spectrum import (
    BlockTag,
    EigenBlockCase,
    NoUnstableDirectionError,
    SaddleSpectrum,
    ZeroEigenvalueError,
    block_diagonal,
    exit_time_bound,
    mu0,
    mu_pair,
    predicted_exit_rate,
    saddle_eigensystem,
)
from .dynamics import (
    DynamicsParams,
    IntegratorConfig,
    Scheme,
    Termination,
    Trajectory,
    heavy_ball_step,
    linear_sde_exact_1d,
    rk4_step,
    sde_step_euler_maruyama,
    simulate,
    stochastic_heavy_ball_step,
)
from .experiments import (
    ExperimentSpec,
    HittingTimeRecord,
    NonMinimumConvergenceError,
    RegressionResult,
    SweepKind,
    SweepResult,
    compare_to_theory,
    find_local_minimum,
    hitting_time,
    loglog_fit,
    make_objective,
    run_sweep,
)

__version__ = "0.1.0"
