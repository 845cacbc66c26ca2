"""Radially symmetric stationary tumor.

Three routes to the stationary radius are provided:

* the delay-free closed form (:func:`build_zeroth`),
* the first-order correction in the delay (:func:`compute_tau_expansion`),
* the full delayed problem solved as a fixed point of the pressure map
  in rescaled coordinates, with an outer bisection on the radius
  (:func:`fixed_point_solve`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad

from .bessel import DEFAULT_SERIES, SeriesConfig, besseli
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DelayTooLargeError,
    DomainError,
    RangeError,
)
from .grid import RadialGridFunction, cumulative_simpson, hermite_eval

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams:
    """Model constants.

    Parameters
    ----------
    mu : float
        Proliferation intensity, ``>= 0``.
    sigma_tilde : float
        Threshold nutrient concentration in ``(0, 1)``.
    tau : float
        Time delay, ``>= 0``.
    lam : float
        Nutrient time constant; only the quasi-steady value 0 is supported.
    """

    mu: float
    sigma_tilde: float
    tau: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        for name in ("mu", "sigma_tilde", "tau", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.mu < 0.0:
            raise DomainError(f"mu must be non-negative, got {self.mu}")
        if not (0.0 < self.sigma_tilde < 1.0):
            raise DomainError(f"sigma_tilde must lie in (0, 1), got {self.sigma_tilde}")
        if self.tau < 0.0:
            raise DomainError(f"tau must be non-negative, got {self.tau}")
        if self.lam != 0.0:
            raise DomainError("only the quasi-steady case lam = 0 is supported")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {"mu": self.mu, "sigma_tilde": self.sigma_tilde, "tau": self.tau, "lambda": self.lam}


def _i1_over_x(x, cfg):
    """``I_1(x)/x`` written as ``(I_0 - I_2)/2`` so that ``x = 0`` is regular."""
    return 0.5 * (besseli(0, x, cfg) - besseli(2, x, cfg))


def P0(R, cfg: SeriesConfig = DEFAULT_SERIES):
    """``I_1(R) / (R I_0(R))``; equals 1/2 at ``R = 0`` and decreases."""
    return _i1_over_x(R, cfg) / besseli(0, R, cfg)


def solve_R0(sigma_tilde: float, tol: float = 1e-13, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Delay-free stationary radius: the root of ``P0(R) = sigma_tilde / 2``.

    Bisection on a bracket grown by doubling from ``[0, 1]``.
    """
    if not (0.0 < sigma_tilde < 1.0):
        raise DomainError(f"sigma_tilde must lie in (0, 1), got {sigma_tilde}")
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    target = 0.5 * sigma_tilde
    lo, hi = 0.0, 1.0
    while P0(hi, cfg) > target:
        lo, hi = hi, 2.0 * hi
        if hi > cfg.argument_cap:
            if P0(cfg.argument_cap, cfg) > target:
                raise RangeError(
                    f"no root of P0(R) = {target} below argument_cap={cfg.argument_cap}"
                )
            hi = cfg.argument_cap
            break
    while hi - lo > 4.0 * np.finfo(float).eps * hi:
        mid = 0.5 * (lo + hi)
        if P0(mid, cfg) > target:
            lo = mid
        else:
            hi = mid
    best = min((lo, hi), key=lambda r: abs(P0(r, cfg) - target))
    res = abs(P0(best, cfg) - target)
    if res >= tol:
        raise ConvergenceError(f"bisection residual {res:.3e} above tol {tol:.1e}")
    return best


@dataclass(frozen=True)
class ZerothOrderSolution:
    """Delay-free stationary state on ``[0, R0]``.

    ``sigma0(r) = I0(r)/I0(R0)`` and
    ``p0(r) = mu*st/4 r^2 - mu I0(r)/I0(R0) + 1/R0 + mu - mu*st/4 R0^2``.
    """

    mu: float
    sigma_tilde: float
    R0: float
    I0R: float
    I1R: float
    I2R: float
    p0_second_at_R0: float
    p0_third_at_R0: float
    cfg: SeriesConfig = field(default=DEFAULT_SERIES, repr=False)

    def sigma0(self, r):
        return besseli(0, r, self.cfg) / self.I0R

    def sigma0_prime(self, r):
        return besseli(1, r, self.cfg) / self.I0R

    def sigma0_second(self, r):
        return 0.5 * (besseli(0, r, self.cfg) + besseli(2, r, self.cfg)) / self.I0R

    def p0(self, r):
        r = np.asarray(r, dtype=float)
        mu, st, R = self.mu, self.sigma_tilde, self.R0
        out = mu * st / 4 * r**2 - mu * besseli(0, r, self.cfg) / self.I0R + 1 / R + mu - mu * st / 4 * R**2
        return out if out.ndim else float(out)

    def p0_prime(self, r):
        return self.mu * self.sigma_tilde / 2 * np.asarray(r) - self.mu * besseli(1, r, self.cfg) / self.I0R

    def p0_second(self, r):
        i1p = 0.5 * (besseli(0, r, self.cfg) + besseli(2, r, self.cfg))
        return self.mu * self.sigma_tilde / 2 - self.mu * i1p / self.I0R

    def to_dict(self) -> dict:
        return {
            "mu": self.mu, "sigma_tilde": self.sigma_tilde, "R0": self.R0,
            "I0R": self.I0R, "I1R": self.I1R, "I2R": self.I2R,
            "p0_second_at_R0": self.p0_second_at_R0, "p0_third_at_R0": self.p0_third_at_R0,
        }


def build_zeroth(params: ModelParams, cfg: SeriesConfig = DEFAULT_SERIES, R0: float | None = None) -> ZerothOrderSolution:
    """Assemble the closed-form delay-free solution."""
    if R0 is None:
        R0 = solve_R0(params.sigma_tilde, cfg=cfg)
    I0, I1, I2 = (besseli(k, R0, cfg) for k in range(3))
    mu = params.mu
    return ZerothOrderSolution(
        mu=mu,
        sigma_tilde=params.sigma_tilde,
        R0=R0,
        I0R=I0, I1R=I1, I2R=I2,
        p0_second_at_R0=mu * (2 * I1 / (R0 * I0) - 1),
        p0_third_at_R0=mu * (1 / R0 - 2 * I1 / (R0**2 * I0) - I1 / I0),
        cfg=cfg,
    )


def A_coefficient(x, cfg: SeriesConfig = DEFAULT_SERIES):
    """``2 (I0 I2 - I1^2)``; negative for ``x > 0``."""
    I0, I1, I2 = (besseli(k, x, cfg) for k in range(3))
    return 2 * (I0 * I2 - I1 * I1)


def B_coefficient(x, cfg: SeriesConfig = DEFAULT_SERIES):
    """``-2 I1 I2 + x I1^2 - x I0 I2``; negative for ``x > 0``."""
    I0, I1, I2 = (besseli(k, x, cfg) for k in range(3))
    return -2 * I1 * I2 + x * I1 * I1 - x * I0 * I2


@dataclass(frozen=True)
class TauExpansion:
    """First-order delay correction of the stationary state.

    The delayed source expands as ``sigma0 + tau (sigma0' p0' + sigma1)``
    and the pressure as ``p0 + tau p1``.
    """

    zeroth: ZerothOrderSolution
    R1: float
    A_value: float
    B_value: float
    p1_second_at_R0: float

    def radius(self, tau: float) -> float:
        return self.zeroth.R0 + tau * self.R1

    def sigma1(self, r):
        z = self.zeroth
        return -besseli(0, r, z.cfg) * z.I1R / z.I0R**2 * self.R1

    def sigma1_prime(self, r):
        z = self.zeroth
        return -besseli(1, r, z.cfg) * z.I1R / z.I0R**2 * self.R1

    def p1_prime(self, r):
        z = self.zeroth
        mu, st, I0R, I1R = z.mu, z.sigma_tilde, z.I0R, z.I1R
        r = np.asarray(r, dtype=float)
        i0, i1, i2 = (besseli(k, r, z.cfg) for k in range(3))
        out = (-mu**2 * st * r * i2 / (2 * I0R)
               + mu**2 / I0R**2 * (r * (i1**2 - i0**2) / 2 + i0 * i1)
               + mu * I1R * self.R1 * i1 / I0R**2)
        return out if out.ndim else float(out)

    def p1_second(self, r):
        z = self.zeroth
        mu, st, I0R, I1R = z.mu, z.sigma_tilde, z.I0R, z.I1R
        r = np.asarray(r, dtype=float)
        i0, i1, i2 = (besseli(k, r, z.cfg) for k in range(3))
        i1r = _i1_over_x(r, z.cfg)
        out = (-mu**2 * st / (2 * I0R) * (r * i1 - i2)
               + mu**2 / I0R**2 * ((i0**2 + i1**2) / 2 - i0 * i1r)
               + mu * I1R * self.R1 / I0R**2 * (i0 - i1r))
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        return {"R1": self.R1, "A": self.A_value, "B": self.B_value,
                "p1_second_at_R0": self.p1_second_at_R0}


def compute_tau_expansion(params: ModelParams, zeroth: ZerothOrderSolution) -> TauExpansion:
    """First-order radius ``R1 = mu B(R0) / A(R0)`` and the ``p1`` evaluators."""
    R0 = zeroth.R0
    A = A_coefficient(R0, zeroth.cfg)
    B = B_coefficient(R0, zeroth.cfg)
    R1 = params.mu * B / A
    mu, st, I0, I1, I2 = params.mu, params.sigma_tilde, zeroth.I0R, zeroth.I1R, zeroth.I2R
    p1_second = (-mu**2 * st / (2 * I0) * (R0 * I1 - I2)
                 + mu**2 / I0**2 * ((I0**2 + I1**2) / 2 - I0 * I1 / R0)
                 + mu * I1 * R1 / I0**2 * (I0 - I1 / R0))
    return TauExpansion(zeroth=zeroth, R1=R1, A_value=A, B_value=B, p1_second_at_R0=p1_second)


def residual_integral(zeroth: ZerothOrderSolution, tauexp: TauExpansion) -> float:
    """First-order mass balance; zero when ``R1`` is consistent with ``R0``.

    ``R1 I1/I0 + R0 (I0 + I2)/(2 I0) R1 - st R0 R1
    + int_0^R0 (sigma0' p0' + sigma1) r dr``.
    """
    z = zeroth
    R0, R1 = z.R0, tauexp.R1

    def integrand(r):
        return (z.sigma0_prime(r) * z.p0_prime(r) + tauexp.sigma1(r)) * r

    val, err = quad(integrand, 0.0, R0, epsabs=1e-14, epsrel=1e-13, limit=200)
    if not np.isfinite(val) or err > 1e-10:
        raise ConvergenceError(f"quadrature error estimate {err:.2e} too large")
    boundary = (R1 * z.I1R / z.I0R + R0 * (z.I0R + z.I2R) / (2 * z.I0R) * R1
                - z.sigma_tilde * R0 * R1)
    return boundary + val


# --------------------------------------------------------------------------
# Full delayed problem in rescaled coordinates on [0, 2]
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointConfig:
    """Discretisation and tolerance settings for :func:`fixed_point_solve`."""

    grid_size: int = 256
    max_iter: int = 60
    tol: float = 1e-13
    char_steps: int = 16
    root_tol: float = 1e-12
    series: SeriesConfig = DEFAULT_SERIES

    def __post_init__(self):
        if self.grid_size < 128 or self.grid_size % 2:
            raise DomainError("grid_size must be an even integer >= 128")
        if self.max_iter < 1 or self.char_steps < 1:
            raise DomainError("max_iter and char_steps must be positive")
        if not (self.tol > 0 and self.root_tol > 0):
            raise DomainError("tolerances must be positive")


@dataclass
class PressureState:
    """Rescaled pressure ``p``, ``p'`` and ``p''`` on the nodes of ``[0, 2]``."""

    p: np.ndarray
    dp: np.ndarray
    d2p: np.ndarray

    def w2inf_distance(self, other: "PressureState") -> float:
        return float(max(np.max(np.abs(self.p - other.p)),
                         np.max(np.abs(self.dp - other.dp)),
                         np.max(np.abs(self.d2p - other.d2p))))

    def w2inf_norm(self) -> float:
        return float(max(np.max(np.abs(self.p)), np.max(np.abs(self.dp)), np.max(np.abs(self.d2p))))

    def sup_distance(self, other: "PressureState") -> float:
        return float(np.max(np.abs(self.p - other.p)))


def _initial_state(x, p_init) -> PressureState:
    if isinstance(p_init, RadialGridFunction):
        return PressureState(np.asarray(p_init(x), float),
                             np.asarray(p_init.derivative(x), float),
                             np.asarray(p_init.derivative(x, 2), float))
    c = float(p_init)
    z = np.zeros_like(x)
    return PressureState(np.full_like(x, c), z, z.copy())


class _PressureMap:
    """The map ``p -> p~`` at a fixed radius ``R``.

    The delay-free part of ``p~`` is known in closed form; only the
    correction driven by ``sigma(xi) - sigma(r)`` is integrated
    numerically, so that the map is exact at ``tau = 0``.
    """

    def __init__(self, R: float, params: ModelParams, cfg: FixedPointConfig):
        self.R = R
        self.params = params
        self.cfg = cfg
        N = cfg.grid_size
        self.x = np.linspace(0.0, 2.0, N + 1)
        self.h = 2.0 / N
        self.m = N // 2
        xi = self.x[: self.m + 1]
        self.xin = xi
        sc = cfg.series
        mu, st = params.mu, params.sigma_tilde
        self.I0R = besseli(0, R, sc)
        i0 = besseli(0, R * xi, sc)
        i1 = besseli(1, R * xi, sc)
        i2 = besseli(2, R * xi, sc)
        self.i0_nodes = i0
        R3 = R**3
        self.base_p = 1 + mu * R * (1 - i0 / self.I0R) - mu * R3 * st * (1 - xi**2) / 4
        self.base_dp = -mu * R**2 * i1 / self.I0R + mu * R3 * st * xi / 2
        self.base_d2p = -mu * R3 * 0.5 * (i0 + i2) / self.I0R + mu * R3 * st / 2
        self.P0 = float(P0(R, sc))

    def _velocity(self, xi, dp_in, d2p_in, dp_one):
        """``-p'(xi)/R^3`` with ``p'`` odd about 0 and constant beyond 1."""
        a = np.abs(xi)
        val = hermite_eval(dp_in, d2p_in, self.h, np.minimum(a, 1.0))
        val = np.where(a > 1.0, dp_one, val)
        return -np.copysign(1.0, xi) * val / self.R**3

    def characteristics(self, state: PressureState) -> np.ndarray:
        """Feet ``xi(-tau; x)`` for the inner nodes, by classical RK4."""
        tau = self.params.tau
        xi = self.xin.copy()
        if tau == 0.0:
            return xi
        dp_in = state.dp[: self.m + 1]
        d2p_in = state.d2p[: self.m + 1]
        dp_one = state.dp[self.m]
        k = self.cfg.char_steps
        ds = -tau / k
        f = lambda z: self._velocity(z, dp_in, d2p_in, dp_one)
        for _ in range(k):
            k1 = f(xi)
            k2 = f(xi + 0.5 * ds * k1)
            k3 = f(xi + 0.5 * ds * k2)
            k4 = f(xi + ds * k3)
            xi = xi + ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.any(np.abs(xi) > 2.0):
            raise ConsistencyError(
                f"characteristic left [0, 2] (max |xi| = {np.max(np.abs(xi)):.4f})")
        return xi

    def apply(self, state: PressureState):
        """Return the image state, the characteristic feet and ``F(R, tau)``."""
        mu, R = self.params.mu, self.R
        R3 = R**3
        xin, h, m = self.xin, self.h, self.m
        xi = self.characteristics(state)
        sc = self.cfg.series
        diff = (besseli(0, R * np.abs(xi), sc) - self.i0_nodes) / self.I0R
        cum = cumulative_simpson(diff * xin, h)
        ddp = np.zeros_like(xin)
        ddp[1:] = -mu * R3 * cum[1:] / xin[1:]
        dd2p = np.zeros_like(xin)
        dd2p[1:] = -mu * R3 * diff[1:] - ddp[1:] / xin[1:]
        dd2p[0] = -0.5 * mu * R3 * diff[0]
        icum = cumulative_simpson(ddp, h)
        dpv = icum - icum[-1]

        N = self.cfg.grid_size
        p = np.empty(N + 1)
        dp = np.empty(N + 1)
        d2p = np.zeros(N + 1)
        p[: m + 1] = self.base_p + dpv
        dp[: m + 1] = self.base_dp + ddp
        d2p[: m + 1] = self.base_d2p + dd2p
        p[m] = 1.0
        dp[m + 1:] = dp[m]
        p[m + 1:] = p[m] + dp[m] * (self.x[m + 1:] - 1.0)
        F = self.P0 - 0.5 * self.params.sigma_tilde + cum[-1]
        return PressureState(p, dp, d2p), xi, float(F)


@dataclass
class PressureSolve:
    """Fixed point of the pressure map at one radius."""

    R: float
    state: PressureState
    xi: np.ndarray
    F: float
    iterations: int
    distances: list
    contraction_estimate: float


def _noise_floor(state: PressureState) -> float:
    return 1e-13 * max(1.0, state.w2inf_norm())


def solve_pressure_at_radius(R: float, params: ModelParams, cfg: FixedPointConfig = FixedPointConfig(),
                             p_init=1.0, _map: _PressureMap | None = None) -> PressureSolve:
    """Iterate the pressure map at fixed ``R`` until the W^{2,inf} step is below ``cfg.tol``.

    ``p_init`` is a constant or a :class:`RadialGridFunction` on ``[0, 2]``,
    or a :class:`PressureState` for warm starts.
    """
    pm = _map or _PressureMap(R, params, cfg)
    state = p_init if isinstance(p_init, PressureState) else _initial_state(pm.x, p_init)
    distances, ratios = [], []
    for it in range(1, cfg.max_iter + 1):
        new, xi, F = pm.apply(state)
        d = new.w2inf_distance(state)
        distances.append(d)
        floor = _noise_floor(new)
        if len(distances) > 1 and distances[-2] > floor and d > floor:
            ratios.append(d / distances[-2])
            if ratios[-1] >= 1.0 and d > 1e3 * floor:
                raise DelayTooLargeError(
                    f"pressure map is not contracting at R={R:.6g}, tau={params.tau:g} "
                    f"(measured ratio {ratios[-1]:.3f})", ratio=ratios[-1])
        state = new
        if d < max(cfg.tol, floor):
            rate = max(ratios) if ratios else 0.0
            return PressureSolve(R, state, xi, F, it, distances, rate)
    raise ConvergenceError(
        f"pressure map did not converge in {cfg.max_iter} iterations (last step {distances[-1]:.2e})")


def mass_balance(R: float, params: ModelParams, cfg: FixedPointConfig = FixedPointConfig()) -> float:
    """``F(R, tau)`` with the pressure at its fixed point for this ``R``."""
    return solve_pressure_at_radius(R, params, cfg).F


def w2inf_bound(params: ModelParams, R_max: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """A priori bound on the W^{2,inf}[0,2] norm of any image of the map.

    ``sigma_max`` is the closed form ``I0(2R)/I0(R)`` on ``[0, 2]``.
    """
    big = replace(cfg, argument_cap=max(cfg.argument_cap, 2.0 * R_max))
    smax = besseli(0, 2 * R_max, big) / besseli(0, R_max, big)
    c = R_max**3 * (smax + params.sigma_tilde)
    return 2.0 * max(1.5 * params.mu * c, 1.0 + 0.25 * params.mu * c)


def contraction_bound(params: ModelParams, R: float, R_min: float, M: float,
                      cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Lipschitz bound ``2 M4 tau`` of the map; ``inf`` when it is vacuous."""
    big = replace(cfg, argument_cap=max(cfg.argument_cap, 2.0 * R))
    dsig = R * besseli(1, 2 * R, big) / besseli(0, R, big)
    denom = R_min**3 - M * params.tau
    if denom <= 0.0:
        return math.inf
    M4 = 1.5 * params.mu * dsig * (1.0 + M * params.tau / denom)
    return 2.0 * M4 * params.tau


@dataclass
class FixedPointSolution:
    """Stationary state of the delayed problem in rescaled coordinates.

    ``p_grid`` is the rescaled pressure on ``[0, 2]`` (Hermite data);
    physical pressure is ``p_grid(r / R_star) / R_star``.
    """

    R_star: float
    p_grid: RadialGridFunction
    iterations: int
    contraction_estimate: float
    F_residual: float
    distances: list
    p_second: np.ndarray
    xi_feet: np.ndarray
    R_S: float
    outer_iterations: int
    params: ModelParams
    w2inf_norm: float = 0.0
    w2inf_bound: float = 0.0
    contraction_bound: float = 0.0

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "R_star": self.R_star,
            "R_S": self.R_S,
            "iterations": self.iterations,
            "outer_iterations": self.outer_iterations,
            "contraction_estimate": self.contraction_estimate,
            "contraction_bound": self.contraction_bound,
            "F_residual": self.F_residual,
            "w2inf_norm": self.w2inf_norm,
            "w2inf_bound": self.w2inf_bound,
            "distances": [float(d) for d in self.distances],
            "p_grid": self.p_grid.to_dict(),
        }


def fixed_point_solve(params: ModelParams, grid_size: int = 256, max_iter: int = 60, tol: float = 1e-13,
                      cfg: FixedPointConfig | None = None, p_init=1.0) -> FixedPointSolution:
    """Stationary radius of the delayed problem.

    For each trial radius the pressure map is iterated to its fixed point
    (warm-started from the previous radius) and ``F(R, tau)`` is
    evaluated; bisection on ``[R_S/2, 3 R_S/2]`` locates the root.  At
    the root the iteration is repeated from ``p_init`` to report the
    iteration count and the measured contraction ratio.
    """
    if cfg is None:
        cfg = FixedPointConfig(grid_size=grid_size, max_iter=max_iter, tol=tol)
    sc = cfg.series
    R_S = solve_R0(params.sigma_tilde, cfg=sc)
    lo, hi = 0.5 * R_S, 1.5 * R_S
    sol_lo = solve_pressure_at_radius(lo, params, cfg)
    sol_hi = solve_pressure_at_radius(hi, params, cfg, p_init=sol_lo.state)
    if not (sol_lo.F > 0.0 > sol_hi.F):
        raise RangeError(
            f"F(R, tau) does not change sign on [{lo:.6g}, {hi:.6g}] "
            f"(F = {sol_lo.F:.3e}, {sol_hi.F:.3e})")
    best = sol_lo if abs(sol_lo.F) < abs(sol_hi.F) else sol_hi
    warm = best.state
    outer = 0
    while abs(best.F) >= cfg.root_tol and hi - lo > 4 * np.finfo(float).eps * hi:
        mid = 0.5 * (lo + hi)
        s = solve_pressure_at_radius(mid, params, cfg, p_init=warm)
        outer += 1
        warm = s.state
        if abs(s.F) < abs(best.F):
            best = s
        if s.F > 0.0:
            lo = mid
        else:
            hi = mid
    R = best.R
    final = solve_pressure_at_radius(R, params, cfg, p_init=p_init)
    log.debug("fixed point: R*=%.15g after %d bisections, ratio %.3e", R, outer, final.contraction_estimate)
    st = final.state
    norm = st.w2inf_norm()
    return FixedPointSolution(
        R_star=R,
        p_grid=RadialGridFunction(2.0, st.p, st.dp),
        iterations=final.iterations,
        contraction_estimate=final.contraction_estimate,
        F_residual=final.F,
        distances=final.distances,
        p_second=st.d2p.copy(),
        xi_feet=final.xi,
        R_S=R_S,
        outer_iterations=outer,
        params=params,
        w2inf_norm=norm,
        w2inf_bound=w2inf_bound(params, 1.5 * R_S, sc),
        contraction_bound=contraction_bound(params, R, 0.5 * R_S, norm, sc),
    )


def scan_mass_balance(params: ModelParams, n: int = 50, cfg: FixedPointConfig = FixedPointConfig()):
    """``F(R, tau)`` on ``n`` equally spaced radii of ``[R_S/2, 3 R_S/2]``."""
    R_S = solve_R0(params.sigma_tilde, cfg=cfg.series)
    radii = np.linspace(0.5 * R_S, 1.5 * R_S, n)
    vals, warm = [], 1.0
    for R in radii:
        s = solve_pressure_at_radius(R, params, cfg, p_init=warm)
        vals.append(s.F)
        warm = s.state
    return radii, np.array(vals)
