"""Delayed free-boundary tumor growth: stationary radius, mode stability, radial dynamics."""

from .bessel import (
    DEFAULT_SERIES,
    IdentityReport,
    SeriesConfig,
    besseli,
    besseli_prime,
    verify_identities,
)
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DelayTooLargeError,
    DivergenceError,
    DomainError,
    FBTumorError,
    HistoryUnderrunError,
    InvariantViolation,
    RangeError,
    StepSizeError,
)
from .grid import RadialGridFunction
from .perturbation import (
    FirstOrderCoefficients,
    ModeState,
    ModeTrajectory,
    classify,
    first_order_coefficients,
    growth_rate,
    make_mode,
    mode_threshold,
    mu_star,
    rho0_trajectory,
    rho1_trajectory,
    solve_Ln_bvp,
    stability_switch,
)
from .radial_sim import (
    DelayTrajectory,
    SimConfig,
    advance,
    compare_variants,
    run_to_steady,
    start_trajectory,
)
from .stationary import (
    FixedPointSolution,
    ModelParams,
    P0,
    TauExpansion,
    ZerothOrderSolution,
    build_zeroth,
    compute_tau_expansion,
    fixed_point_solve,
    solve_R0,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
