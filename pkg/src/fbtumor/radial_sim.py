"""Delayed radially symmetric tumor evolution.

The radius obeys

    R'(t) = (mu/R) [ int_0^R sigma(xi(t - tau; r, t), t - tau) r dr - st R^2 / 2 ],

with ``sigma(., s) = I0(.) / I0(R(s))`` and ``xi`` the backward
characteristic of the velocity field ``-dp/dr``.  Pressure profiles are
kept on a normalised grid at every time level of the delay window; the
characteristics are integrated backwards with RK4 through a cubic
Lagrange interpolant in time of those profiles.  Time stepping is a
predictor-corrector (Adams-Bashforth / Adams-Moulton) iterated to
self-consistency of the radius and the current profile.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import DEFAULT_SERIES, SeriesConfig, besseli
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    HistoryUnderrunError,
)
from .grid import RadialGridFunction, cumulative_simpson
from .stationary import ModelParams, solve_R0

log = logging.getLogger(__name__)

VARIANTS = ("full_delay", "dropped_Otau")
# smoothness breakpoints k*tau treated explicitly; later ones are C^4 or better
BREAKPOINTS = 4


@dataclass(frozen=True)
class SimConfig:
    """Time-stepping controls.

    ``dt <= tau/4`` is required for the full-delay variant.
    """

    dt: float
    t_end: float
    variant: str = "full_delay"
    characteristic_substeps: int = 8
    grid_size: int = 128
    steady_tol: float = 1e-8
    corrector_tol: float = 1e-12
    max_corrector: int = 30
    divergence_factor: float = 10.0
    endpoint_tol: float = 1e-6
    series: SeriesConfig = DEFAULT_SERIES

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.t_end > 0:
            raise DomainError("t_end must be positive")
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}")
        if self.characteristic_substeps < 8:
            raise DomainError("characteristic_substeps must be >= 8")
        if self.grid_size < 64:
            raise DomainError("grid_size must be >= 64")

    def check(self, params: ModelParams):
        if self.variant == "full_delay" and params.tau > 0 and self.dt > params.tau / 4 * (1 + 1e-12):
            raise DomainError(f"dt={self.dt} exceeds tau/4={params.tau / 4} for the full-delay variant")


def _lagrange_weights(theta: float, m: int):
    """Lagrange weights on the integer nodes ``0..m-1`` at ``theta``."""
    w = []
    for i in range(m):
        c = 1.0
        for k in range(m):
            if k != i:
                c *= (theta - k) / (i - k)
        w.append(c)
    return w


class _History:
    """Time levels ``t >= 0`` plus the state at rest on ``[-tau, 0)``.

    Slot ``k`` holds global level ``k0 + k`` at time ``(k0 + k) dt``; the last slot may hold a trial
    level that the corrector overwrites.  Before ``t = 0`` the radius is
    ``R_init`` and the pressure is the fixed profile ``rest_dp``.  The
    velocity jumps at ``t = 0``, so interpolation never crosses it.
    """

    def __init__(self, dt, R_init, rest_dp, rest_d2p, capacity, breaks=()):
        n_nodes = rest_dp.size
        self.breaks = tuple(sorted(breaks))
        self.k0 = 0
        self.dt = dt
        self.R_init = R_init
        self.rest_dp = rest_dp
        self.rest_d2p = rest_d2p
        self.capacity = capacity
        self.R = np.empty(capacity)
        self.Rdot = np.empty(capacity)
        self.dp = np.empty((capacity, n_nodes))
        self.d2p = np.empty((capacity, n_nodes))
        self.sx = np.empty((capacity, n_nodes))  # slope in x = r / R
        self.count = 0
        self._stencils = {}

    def time(self, k):
        return (self.k0 + k) * self.dt

    @property
    def t_last(self):
        return self.time(self.count - 1)

    def push(self, R, Rdot, dp, d2p):
        if self.count == self.capacity:
            keep = self.capacity // 2
            shift = self.count - keep
            self.R[:keep] = self.R[shift:self.count]
            self.Rdot[:keep] = self.Rdot[shift:self.count]
            self.dp[:keep] = self.dp[shift:self.count]
            self.d2p[:keep] = self.d2p[shift:self.count]
            self.sx[:keep] = self.sx[shift:self.count]
            self.k0 += shift
            self.count = keep
        k = self.count
        self.R[k], self.Rdot[k] = R, Rdot
        self.dp[k], self.d2p[k], self.sx[k] = dp, d2p, R * d2p
        self.count += 1
        self._stencils.clear()

    def set_last(self, R, Rdot, dp, d2p):
        k = self.count - 1
        self.R[k], self.Rdot[k] = R, Rdot
        self.dp[k], self.d2p[k], self.sx[k] = dp, d2p, R * d2p

    def stencil(self, s):
        """First index and weights of the (at most cubic) interpolant at ``s >= 0``."""
        hit = self._stencils.get(s)
        if hit is None:
            hit = self._stencils[s] = self._stencil(s)
        return hit

    def _stencil(self, s):
        u = s / self.dt - self.k0
        if self.count == 0 or u < -1e-9 or u > self.count - 1 + 1e-9:
            raise HistoryUnderrunError(
                f"time {s:.6g} outside stored history [{self.time(0):.6g}, {self.t_last:.6g}]")
        # stay inside the smooth piece between derivative breakpoints
        lo, hi = 0, self.count - 1
        for b in self.breaks:
            kb = b / self.dt - self.k0
            if kb <= u + 1e-9:
                lo = max(lo, int(math.ceil(kb - 1e-9)))
            else:
                hi = min(hi, int(math.floor(kb + 1e-9)))
                break
        m = min(4, hi - lo + 1)
        j = min(max(int(math.floor(u)) - 1, lo), hi - m + 1)
        return j, np.array(_lagrange_weights(u - j, m))

    def radius_at(self, s):
        if s < 0.0:
            return self.R_init
        j, w = self.stencil(s)
        return float(sum(wi * self.R[j + i] for i, wi in enumerate(w)))

    def covers(self, s) -> bool:
        return s < 0.0 or self.k0 <= s / self.dt + 1e-9

    def profiles(self):
        """Stored ``(t, dp/dr)`` profiles as grid functions on ``[0, R(t)]``."""
        return [(self.time(k), RadialGridFunction(self.R[k], self.dp[k].copy(), self.d2p[k].copy()))
                for k in range(self.count)]


@dataclass
class StepDiagnostics:
    xi_endpoint_error: float
    jacobian_min: float
    jacobian_max: float
    corrector_iterations: int


@dataclass
class DelayTrajectory:
    """Radius history of one simulation.

    ``times``/``R_values``/``Rdot_values`` start at ``t = 0``; the
    history buffer additionally holds the constant initial data on
    ``[-tau, 0]``.
    """

    times: list
    R_values: list
    Rdot_values: list
    history_buffer: _History
    config: SimConfig
    params: ModelParams
    R_reference: float
    diagnostics: list = field(default_factory=list)
    xi_feet: np.ndarray | None = None
    _builder: object = field(default=None, repr=False, compare=False)

    @property
    def t(self) -> float:
        return self.times[-1]

    @property
    def R(self) -> float:
        return self.R_values[-1]

    @property
    def Rdot(self) -> float:
        return self.Rdot_values[-1]

    def radius_at(self, s: float) -> float:
        """``R(s)`` for ``s`` in the stored window, ``R_init`` for ``s < 0``."""
        return self.history_buffer.radius_at(s)

    def max_endpoint_error(self) -> float:
        vals = [d.xi_endpoint_error for d in self.diagnostics if np.isfinite(d.xi_endpoint_error)]
        return max(vals) if vals else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,R,Rdot\n")
        for row in zip(self.times, self.R_values, self.Rdot_values):
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


class _ProfileBuilder:
    """Pressure profile at the current time from the stored history."""

    def __init__(self, params: ModelParams, cfg: SimConfig):
        self.params = params
        self.cfg = cfg
        self.N = cfg.grid_size
        self.x = np.linspace(0.0, 1.0, self.N + 1)
        self.hx = 1.0 / self.N

    def _eval(self, Rs, dp, slope_x, xi):
        """Profile given on ``x = r / Rs`` at ``|xi|``, linear beyond ``Rs``.

        Inlined uniform-grid cubic Hermite; this is the simulator's inner loop.
        """
        N = self.N
        x = np.abs(xi) / Rs
        s = np.minimum(x, 1.0) * N
        i = np.minimum(s.astype(np.intp), N - 1)
        t = s - i
        v0, v1 = dp[i], dp[i + 1]
        d0, d1 = slope_x[i] * self.hx, slope_x[i + 1] * self.hx
        inner = v0 + t * (d0 + t * (3 * (v1 - v0) - 2 * d0 - d1 + t * (2 * (v0 - v1) + d0 + d1)))
        outer = dp[-1] + slope_x[-1] * (x - 1.0)
        return np.copysign(1.0, xi) * np.where(x <= 1.0, inner, outer)

    def _field(self, hist: _History, xi, s):
        """``dp/dr`` at positions ``xi`` and time ``s >= 0`` (odd in ``xi``).

        Levels are blended in time on the normalised coordinate ``r/R``.
        """
        j, w = hist.stencil(s)
        k = slice(j, j + w.size)
        return self._eval(w @ hist.R[k], w @ hist.dp[k], w @ hist.sx[k], xi)

    def _rest_field(self, hist: _History, xi, s=None):
        return self._eval(hist.R_init, hist.rest_dp, hist.R_init * hist.rest_d2p, xi)

    def _rk4(self, field, hist, xi, s0, s1):
        m = self.cfg.characteristic_substeps
        h = (s1 - s0) / m
        for i in range(m):
            s = s0 + i * h
            k1 = -field(hist, xi, s)
            k2 = -field(hist, xi + 0.5 * h * k1, s + 0.5 * h)
            k3 = -field(hist, xi + 0.5 * h * k2, s + 0.5 * h)
            k4 = -field(hist, xi + h * k3, s + h)
            xi = xi + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return xi

    def feet(self, hist: _History, t, R):
        """``xi(t - tau; r, t)`` on the grid ``r = R x``.

        The backward integration is split at ``t = 0``, where the velocity
        jumps, and at the derivative breakpoints ``k tau``; each piece uses
        the configured number of RK4 substeps.
        """
        tau = self.params.tau
        xi = R * self.x
        if tau == 0.0:
            return xi
        t_lo = t - tau
        cuts = [b for b in (0.0,) + hist.breaks if t_lo < b < t]
        edges = [t] + sorted(cuts, reverse=True) + [t_lo]
        for s0, s1 in zip(edges[:-1], edges[1:]):
            field = self._field if s0 > 0.0 else self._rest_field
            xi = self._rk4(field, hist, xi, s0, s1)
        return xi

    def build(self, hist: _History, t, R):
        """Profile, ``R'``, feet and delayed radius for radius ``R`` at time ``t``."""
        mu, st, tau = self.params.mu, self.params.sigma_tilde, self.params.tau
        sc = self.cfg.series
        xi = self.feet(hist, t, R)
        R_past = hist.radius_at(t - tau) if tau > 0 else R
        # loose guard for trial radii; accepted steps are checked in advance()
        if np.any(xi < -1e-3 * R) or np.any(xi > R_past * (1 + 1e-3)):
            raise ConsistencyError(
                f"characteristic left the tumor at t={t:.6g} "
                f"(feet range [{xi.min():.6g}, {xi.max():.6g}], R(t-tau)={R_past:.6g})")
        r = R * self.x
        n = r.size
        i1r = besseli(1, r, sc)
        if tau > 0:
            i0 = besseli(0, np.concatenate([r, np.abs(xi), [R_past]]), sc)
            i0r, i0xi, I0p = i0[:n], i0[n:2 * n], i0[-1]
            cum = cumulative_simpson((i0xi - i0r) * r, R * self.hx)
        else:
            i0 = besseli(0, np.append(r, R_past), sc)
            i0r, I0p = i0[:n], i0[-1]
            i0xi = i0r
            cum = np.zeros_like(r)
        dp = np.empty_like(r)
        dp[1:] = -mu * (i1r[1:] + cum[1:] / r[1:]) / I0p + mu * st * r[1:] / 2
        dp[0] = 0.0
        d2p = np.empty_like(r)
        d2p[1:] = -mu * (i0xi[1:] / I0p - st) - dp[1:] / r[1:]
        d2p[0] = -0.5 * mu * (i0xi[0] / I0p - st)
        return dp, d2p, -dp[-1], xi, R_past


def _dropped_rate(params: ModelParams, R, R_past, sc):
    """Right side with the O(tau) characteristic shift removed."""
    mu, st = params.mu, params.sigma_tilde
    Rd = R_past
    return mu / R * (Rd * besseli(1, Rd, sc) / besseli(0, Rd, sc) - st * R * R / 2)


def rest_profile(builder: _ProfileBuilder, R, tol=1e-14, max_iter=200):
    """Pressure of the tumor at rest with radius ``R`` on ``[-tau, 0)``.

    Fixed point of: rebuild the profile from the history, then subtract
    the linear field ``p'(R) r / R`` so that the boundary does not move.
    The subtraction amounts to a uniform adjustment of the proliferation
    threshold; at the stationary radius it vanishes and the rest state is
    the stationary solution itself.  Returns the rest profile and the
    unadjusted profile it generates at ``t = 0``.
    """
    n = builder.N + 1
    x = builder.x
    hist = _History(1.0, R, np.zeros(n), np.zeros(n), 1)
    for _ in range(max_iter):
        dp, d2p, _, _, _ = builder.build(hist, 0.0, R)
        edge = dp[-1]
        new_dp = dp - edge * x
        new_d2p = d2p - edge / R
        change = float(np.max(np.abs(new_d2p - hist.rest_d2p)))
        hist.rest_dp, hist.rest_d2p = new_dp, new_d2p
        if change < tol * max(1.0, float(np.max(np.abs(new_d2p)))):
            dp, d2p, _, _, _ = builder.build(hist, 0.0, R)
            return new_dp, new_d2p, dp, d2p
    raise ConvergenceError("rest-state pressure profile did not converge")


# coefficients on f_k, f_{k-1}, ... (Bashforth) and f_{k+1}, f_k, ... (Moulton)
_ADAMS_BASHFORTH = {1: (1.0,), 2: (1.5, -0.5), 3: (23 / 12, -16 / 12, 5 / 12)}
_ADAMS_MOULTON = {1: (0.5, 0.5), 2: (5 / 12, 8 / 12, -1 / 12), 3: (9 / 24, 19 / 24, -5 / 24, 1 / 24)}


def _breakpoints(tau, dt, count=BREAKPOINTS):
    """Times ``k tau`` where the solution's smoothness jumps, if on the time grid."""
    if tau <= 0:
        return ()
    ratio = tau / dt
    if abs(ratio - round(ratio)) > 1e-9 * ratio:
        return ()
    return tuple(k * tau for k in range(1, count + 1))


def start_trajectory(R_init: float, params: ModelParams, cfg: SimConfig,
                     R_reference: float | None = None) -> DelayTrajectory:
    """Trajectory holding the constant initial data on ``[-tau, 0]``."""
    if not R_init > 0:
        raise DomainError("R_init must be positive")
    cfg.check(params)
    builder = _ProfileBuilder(params, cfg)
    dt = cfg.dt
    lag = int(math.ceil(params.tau / dt - 1e-9)) if params.tau > 0 else 0
    capacity = max(4 * (lag + 4), 64)
    n = cfg.grid_size + 1
    if cfg.variant == "full_delay":
        rest_dp, rest_d2p, dp, d2p = rest_profile(builder, R_init)
        Rdot0 = -dp[-1]
    else:
        rest_dp = rest_d2p = dp = d2p = np.zeros(n)
        Rdot0 = _dropped_rate(params, R_init, R_init, cfg.series)
    hist = _History(dt, R_init, rest_dp, rest_d2p, capacity, _breakpoints(params.tau, dt))
    hist.push(R_init, Rdot0, dp, d2p)
    if R_reference is None:
        R_reference = solve_R0(params.sigma_tilde, cfg=cfg.series)
    return DelayTrajectory(times=[0.0], R_values=[R_init], Rdot_values=[float(Rdot0)],
                           history_buffer=hist, config=cfg, params=params, R_reference=R_reference,
                           xi_feet=builder.x * R_init if cfg.variant == "full_delay" else None,
                           _builder=builder)


def advance(traj: DelayTrajectory, params: ModelParams) -> DelayTrajectory:
    """Advance the trajectory by one time step (in place; also returned)."""
    cfg = traj.config
    hist = traj.history_buffer
    if abs(hist.t_last - traj.t) > 1e-9 * max(1.0, traj.t):
        raise HistoryUnderrunError("history buffer out of sync with trajectory")
    if params.tau > 0 and not hist.covers(traj.t + cfg.dt - params.tau):
        raise HistoryUnderrunError("history buffer does not cover the delay window")
    builder = traj._builder
    if builder is None or builder.params != params:
        builder = traj._builder = _ProfileBuilder(params, cfg)
    dt = cfg.dt
    t_new = len(traj.times) * dt
    Rk = traj.R
    f = traj.Rdot_values

    # multistep order restarts after each breakpoint
    last_break = max([0.0] + [b for b in hist.breaks if b <= traj.t + 1e-9 * dt])
    q = min(3, int(round((traj.t - last_break) / dt)) + 1)
    ab, am = _ADAMS_BASHFORTH[q], _ADAMS_MOULTON[q]
    past = [f[-1 - i] for i in range(q)]
    R_pred = Rk + dt * sum(c * v for c, v in zip(ab, past))
    k = hist.count - 1
    if cfg.variant == "full_delay" and hist.count >= 3:
        cand_dp = 3 * hist.dp[k] - 3 * hist.dp[k - 1] + hist.dp[k - 2]
        cand_d2p = 3 * hist.d2p[k] - 3 * hist.d2p[k - 1] + hist.d2p[k - 2]
    elif cfg.variant == "full_delay" and hist.count == 2:
        cand_dp = 2 * hist.dp[k] - hist.dp[k - 1]
        cand_d2p = 2 * hist.d2p[k] - hist.d2p[k - 1]
    else:
        cand_dp, cand_d2p = hist.dp[k], hist.d2p[k]
    hist.push(R_pred, f[-1], cand_dp, cand_d2p)

    R_cur = R_pred
    xi = None
    R_past = math.nan
    for it in range(1, cfg.max_corrector + 1):
        if cfg.variant == "full_delay":
            dp, d2p, fnew, xi, R_past = builder.build(hist, t_new, R_cur)
        else:
            R_past = hist.radius_at(t_new - params.tau) if params.tau > 0 else R_cur
            fnew = _dropped_rate(params, R_cur, R_past, cfg.series)
            dp, d2p = cand_dp, cand_d2p
        R_new = Rk + dt * (am[0] * fnew + sum(c * v for c, v in zip(am[1:], past)))
        prof_change = float(np.max(np.abs(dp - hist.dp[hist.count - 1])))
        hist.set_last(R_new, fnew, dp, d2p)
        if abs(R_new - R_cur) < cfg.corrector_tol * max(1.0, abs(R_new)) and \
                prof_change < 1e3 * cfg.corrector_tol * max(1.0, float(np.max(np.abs(dp)))):
            R_cur = R_new
            break
        R_cur = R_new
    else:
        raise ConvergenceError(f"corrector did not converge at t={t_new:.6g}")

    if not (R_cur > 0) or R_cur > cfg.divergence_factor * traj.R_reference:
        raise DivergenceError(
            f"radius {R_cur:.6g} left (0, {cfg.divergence_factor} R_ref] at t={t_new:.6g}")

    # the last corrector pass ran at a radius within corrector_tol of R_cur
    if cfg.variant == "full_delay":
        jac = np.gradient(xi, R_cur * builder.x)
        diag = StepDiagnostics(abs(xi[-1] - R_past) if params.tau > 0 else 0.0,
                               float(jac.min()), float(jac.max()), it)
        traj.xi_feet = xi
    else:
        diag = StepDiagnostics(math.nan, 1.0, 1.0, it)
    if params.tau > 0 and cfg.variant == "full_delay":
        if diag.xi_endpoint_error > cfg.endpoint_tol:
            raise ConsistencyError(
                f"characteristic endpoint mismatch {diag.xi_endpoint_error:.2e} at t={t_new:.6g}")
        if xi.min() < -cfg.endpoint_tol or xi.max() > R_past + cfg.endpoint_tol:
            raise ConsistencyError(f"characteristic left [0, R(t - tau)] at t={t_new:.6g}")
    traj.times.append(t_new)
    traj.R_values.append(float(R_cur))
    traj.Rdot_values.append(float(fnew))
    traj.diagnostics.append(diag)
    return traj


def run_to_steady(R_init: float, params: ModelParams, cfg: SimConfig,
                  R_reference: float | None = None, min_time: float = 0.0) -> DelayTrajectory:
    """Integrate until ``|R'| < cfg.steady_tol`` over a full delay window, or ``t_end``."""
    traj = start_trajectory(R_init, params, cfg, R_reference)
    window = max(params.tau, 5 * cfg.dt)
    quiet_since = 0.0 if abs(traj.Rdot) < cfg.steady_tol else None
    while traj.t < cfg.t_end - 1e-12:
        advance(traj, params)
        if abs(traj.Rdot) < cfg.steady_tol:
            if quiet_since is None:
                quiet_since = traj.t
            if traj.t - quiet_since >= window and traj.t >= min_time:
                break
        else:
            quiet_since = None
    return traj


def terminal_mass_balance(traj: DelayTrajectory) -> float:
    """``int_0^R [sigma(xi(t - tau; r, t), t - tau) - st] r dr`` at the last state.

    Evaluated by Simpson quadrature over the stored characteristic feet;
    it vanishes at a stationary state.
    """
    params, cfg = traj.params, traj.config
    if traj.xi_feet is None:
        raise DomainError("mass balance needs the full-delay variant")
    R_past = traj.radius_at(traj.t - params.tau) if params.tau > 0 else traj.R
    r = np.linspace(0.0, traj.R, traj.xi_feet.size)
    sig = besseli(0, np.abs(traj.xi_feet), cfg.series) / besseli(0, R_past, cfg.series)
    return float(cumulative_simpson((sig - params.sigma_tilde) * r, r[1])[-1])


@dataclass
class VariantComparison:
    """Distances between the full-delay and the truncated dynamics."""

    tau: float
    distance: float
    distance_half: float
    ratio: float
    terminal_full: float
    terminal_dropped: float
    terminal_full_half: float
    terminal_dropped_half: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _sup_distance(a: DelayTrajectory, b: DelayTrajectory) -> float:
    n = min(len(a.R_values), len(b.R_values))
    ra = np.asarray(a.R_values[:n])
    rb = np.asarray(b.R_values[:n])
    d = float(np.max(np.abs(ra - rb)))
    # a run that stopped early sits at its steady radius from then on
    if len(a.R_values) != len(b.R_values):
        longer, shorter = (a, b) if len(a.R_values) > len(b.R_values) else (b, a)
        tail = np.asarray(longer.R_values[n:])
        d = max(d, float(np.max(np.abs(tail - shorter.R_values[-1]))))
    return d


def _run_fixed(R_init, params, cfg):
    traj = start_trajectory(R_init, params, cfg)
    while traj.t < cfg.t_end - 1e-12:
        advance(traj, params)
    return traj


def compare_variants(R_init: float, params: ModelParams, cfg: SimConfig) -> VariantComparison:
    """Sup-distance between the two variants at ``tau`` and ``tau/2``.

    All four runs share one step ``dt = min(cfg.dt, tau/8)`` and the same
    horizon, so that the distance halves with ``tau`` when it is O(tau).
    At ``tau = 0`` the variants coincide and the ratio is reported as NaN.
    """
    if params.tau < 0:
        raise DomainError("tau must be non-negative")
    dt = min(cfg.dt, params.tau / 8) if params.tau > 0 else cfg.dt
    out = {}
    for label, tau in (("full", params.tau), ("half", params.tau / 2)):
        p = params.with_(tau=tau)
        c_full = SimConfig(**{**cfg.__dict__, "dt": dt, "variant": "full_delay"})
        c_drop = SimConfig(**{**cfg.__dict__, "dt": dt, "variant": "dropped_Otau"})
        a = _run_fixed(R_init, p, c_full)
        b = _run_fixed(R_init, p, c_drop)
        out[label] = (_sup_distance(a, b), float(a.R), float(b.R))
    d1, d2 = out["full"][0], out["half"][0]
    ratio = math.nan if params.tau == 0 else (d1 / d2 if d2 > 0 else math.inf)
    return VariantComparison(
        tau=params.tau, distance=d1, distance_half=d2, ratio=ratio,
        terminal_full=out["full"][1], terminal_dropped=out["full"][2],
        terminal_full_half=out["half"][1], terminal_dropped_half=out["half"][2],
    )
