"""Linear stability of the stationary tumor under ``cos(n theta)`` modes.

The boundary amplitude of mode ``n`` is expanded as ``rho0 + tau rho1``.
The zeroth-order amplitude grows like ``exp(g_n t)``; the first-order
amplitude obeys ``rho1' = a_n rho1 + b_n rho0(t)`` with ``a_n = g_n``
(checked numerically) and a forcing coefficient ``b_n`` assembled from
closed-form boundary data plus three radial elliptic solves.  The
``sin(n theta)`` branch has identical dynamics and is not coded
separately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .bessel import DEFAULT_SERIES, SeriesConfig, besseli
from .errors import ConvergenceError, DomainError, InvariantViolation, StepSizeError
from .grid import RadialGridFunction
from .stationary import ModelParams, TauExpansion, ZerothOrderSolution

log = logging.getLogger(__name__)


def stability_bracket(n: int, x, cfg: SeriesConfig = DEFAULT_SERIES):
    """``1 - 2 I1/(x I0) - I1 I_{n+1}/(I0 I_n)``; positive for ``n >= 2``."""
    I0, I1 = besseli(0, x, cfg), besseli(1, x, cfg)
    In, In1 = besseli(n, x, cfg), besseli(n + 1, x, cfg)
    return 1.0 - 2.0 * I1 / (x * I0) - I1 * In1 / (I0 * In)


def growth_rate(n: int, params: ModelParams, R0: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Zeroth-order growth rate ``g_n`` of mode ``n``."""
    if n < 0:
        raise DomainError("mode index must be non-negative")
    if not R0 > 0:
        raise DomainError("R0 must be positive")
    if n == 1:
        # the bracket vanishes identically; evaluate it in cancellation-free form
        I0, I1, I2 = (besseli(k, R0, cfg) for k in range(3))
        return params.mu * (I0 - I2 - 2.0 * I1 / R0) / I0
    return params.mu * stability_bracket(n, R0, cfg) - n * (n * n - 1) / R0**3


def mode_threshold(n: int, R0: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Neutral value ``mu_n^0`` of the proliferation intensity (``inf`` for n = 0, 1)."""
    if n < 0:
        raise DomainError("mode index must be non-negative")
    if n < 2:
        return math.inf
    br = stability_bracket(n, R0, cfg)
    if not br > 0.0:
        raise InvariantViolation(f"stability bracket not positive for n={n}, R0={R0}: {br}")
    return n * (n * n - 1) / R0**3 / br


def mu_star(R0: float, cfg: SeriesConfig = DEFAULT_SERIES, scan_to: int = 32) -> float:
    """Critical intensity: the smallest threshold, attained at ``n = 2``."""
    th = [mode_threshold(n, R0, cfg) for n in range(2, scan_to + 1)]
    if int(np.argmin(th)) != 0:
        raise InvariantViolation("minimum threshold not attained at n = 2")
    return th[0]


def classify(g: float, scale: float = 1.0, tol: float = 1e-12) -> str:
    """``stable`` / ``neutral`` / ``unstable`` from the sign of a growth rate."""
    if abs(g) <= tol * max(scale, 1.0):
        return "neutral"
    return "unstable" if g > 0 else "stable"


# --------------------------------------------------------------------------
# zeroth-order mode fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeZerothFields:
    """Perturbation fields of mode ``n`` per unit boundary amplitude.

    ``w0(r) = -I1(R0) I_n(r) / (I0(R0) I_n(R0))`` and
    ``q0(r) = C1 r^n - mu w0(r)``.
    """

    n: int
    mu: float
    R0: float
    C1: float
    q0_prime_at_R0: float
    q0_second_at_R0: float
    w_scale: float
    cfg: SeriesConfig = field(default=DEFAULT_SERIES, repr=False)

    def w0(self, r):
        return self.w_scale * besseli(self.n, r, self.cfg)

    def w0_prime(self, r):
        n = self.n
        if n == 0:
            d = besseli(1, r, self.cfg)
        else:
            d = 0.5 * (besseli(n - 1, r, self.cfg) + besseli(n + 1, r, self.cfg))
        return self.w_scale * d

    def q0(self, r):
        r = np.asarray(r, dtype=float)
        return self.C1 * r**self.n - self.mu * self.w0(r)

    def q0_prime(self, r):
        r = np.asarray(r, dtype=float)
        lead = self.n * self.C1 * r ** (self.n - 1) if self.n > 0 else 0.0 * r
        return lead - self.mu * self.w0_prime(r)

    def __iter__(self):
        # unpacks as (w0, q0, C1, q0'(R0), q0''(R0))
        return iter((self.w0, self.q0, self.C1, self.q0_prime_at_R0, self.q0_second_at_R0))


def mode_zeroth_fields(n: int, params: ModelParams, zeroth: ZerothOrderSolution) -> ModeZerothFields:
    """Closed-form ``w0``, ``q0`` and the boundary derivatives of ``q0``."""
    if n < 0:
        raise DomainError("mode index must be non-negative")
    cfg = zeroth.cfg
    R0, mu = zeroth.R0, params.mu
    I0, I1 = zeroth.I0R, zeroth.I1R
    In, In1 = besseli(n, R0, cfg), besseli(n + 1, R0, cfg)
    C1 = R0 ** (-n) * ((n * n - 1) / R0**2 - mu * I1 / I0)
    qp = n * (n * n - 1) / R0**3 + mu * I1 * In1 / (I0 * In)
    qpp = (n * (n - 1) / R0**2 * ((n * n - 1) / R0**2 - mu * I1 / I0)
           - mu * I1 * In1 / (R0 * I0 * In)
           + mu * (R0**2 + n * n - n) * I1 / (R0**2 * I0))
    return ModeZerothFields(n=n, mu=mu, R0=R0, C1=C1, q0_prime_at_R0=qp, q0_second_at_R0=qpp,
                            w_scale=-I1 / (I0 * In), cfg=cfg)


# --------------------------------------------------------------------------
# radial elliptic solves
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeBvpResult:
    """Solution of ``L_n u = b``, ``u(R0) = g`` on a uniform grid."""

    solution: RadialGridFunction
    boundary_derivative: float
    residual: float


def _ln_bands(n: int, r: np.ndarray, h: float):
    """Tridiagonal centred-difference ``L_n`` on the unknown nodes.

    Unknowns are ``u_0..u_{N-1}`` for ``n = 0`` (ghost-point symmetry at
    the origin) and ``u_1..u_{N-1}`` otherwise (``u_0 = 0``).
    """
    N = r.size - 1
    first = 0 if n == 0 else 1
    ri = r[first:N]
    lower = -1.0 / h**2 + 1.0 / (2.0 * h * np.where(ri > 0, ri, 1.0))
    diag = 2.0 / h**2 + n * n / np.where(ri > 0, ri, 1.0) ** 2
    upper = -1.0 / h**2 - 1.0 / (2.0 * h * np.where(ri > 0, ri, 1.0))
    if n == 0:
        diag[0] = 4.0 / h**2
        upper[0] = -4.0 / h**2
        lower[0] = 0.0
    return first, lower, diag, upper


def solve_Ln_bvp(n: int, rhs: RadialGridFunction, boundary_value: float, R0: float) -> ModeBvpResult:
    """Second-order finite differences for ``-u'' - u'/r + n^2 u / r^2 = b``.

    Regularity at the origin is ``u(0) = 0`` for ``n >= 1`` and
    ``u'(0) = 0`` for ``n = 0``.  The boundary derivative uses the
    one-sided stencil ``(3u_N - 4u_{N-1} + u_{N-2}) / (2h)``.
    """
    if n < 0:
        raise DomainError("mode index must be non-negative")
    if abs(rhs.r_max - R0) > 1e-12 * R0:
        raise DomainError("right side must live on [0, R0]")
    r = rhs.r
    h = rhs.h
    N = r.size - 1
    b = np.asarray(rhs.values, dtype=float)
    first, lower, diag, upper = _ln_bands(n, r, h)
    f = b[first:N].copy()
    f[-1] -= upper[-1] * boundary_value
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    try:
        sol = solve_banded((1, 1), ab, f)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"singular discrete L_{n} system") from exc
    if not np.all(np.isfinite(sol)):
        raise ConvergenceError(f"non-finite solution of discrete L_{n} system")
    u = np.zeros(N + 1)
    u[first:N] = sol
    u[N] = boundary_value
    Lu = diag * u[first:N] + upper * u[first + 1:N + 1]
    Lu[1:] += lower[1:] * u[first:N - 1]
    if first == 1:
        Lu[0] += lower[0] * u[0]
    scale = max(float(np.max(np.abs(b))), 1e-300)
    residual = float(np.max(np.abs(Lu - b[first:N]))) / scale
    du = (3.0 * u[N] - 4.0 * u[N - 1] + u[N - 2]) / (2.0 * h)
    return ModeBvpResult(RadialGridFunction(R0, u), float(du), residual)


# --------------------------------------------------------------------------
# first-order mode dynamics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FirstOrderCoefficients:
    """``rho1' = homogeneous * rho1 + forcing * rho0(t)``.

    ``parts`` lists the contributions to ``forcing`` by origin and
    ``bvp_derivatives`` the boundary slopes of the particular solutions.
    """

    n: int
    homogeneous: float
    forcing: float
    method: str
    parts: dict
    bvp_derivatives: dict
    C3_rho0: float
    C3_rho1: float


def _bvp_rhs(n, params, zeroth, fields, g, r):
    """Right sides of the three particular problems, per unit ``rho0``."""
    mu = params.mu
    b1 = mu * zeroth.sigma0_prime(r) * fields.q0_prime(r)
    b2 = mu * fields.w0_prime(r) * zeroth.p0_prime(r)
    b3 = -mu * g * fields.w0(r)
    return b1, b2, b3


def _bvp_slopes(n, params, zeroth, fields, g, grid_size, richardson=True):
    R0 = zeroth.R0

    def slopes(N):
        r = np.linspace(0.0, R0, N + 1)
        out = []
        for b in _bvp_rhs(n, params, zeroth, fields, g, r):
            out.append(solve_Ln_bvp(n, RadialGridFunction(R0, b), 0.0, R0).boundary_derivative)
        return np.array(out)

    d = slopes(grid_size)
    if richardson:
        d = (4.0 * slopes(2 * grid_size) - d) / 3.0
    return dict(zip(("u1", "u2", "u3"), (float(v) for v in d)))


def _n1_particular(params, zeroth, tauexp, rho0, rho1):
    """Closed-form particular solutions for ``n = 1`` and their values/slopes at R0."""
    cfg = zeroth.cfg
    mu, R0, R1 = params.mu, zeroth.R0, tauexp.R1
    I0R, I1R = zeroth.I0R, zeroth.I1R
    i0, i1, i2 = (besseli(k, R0, cfg) for k in range(3))
    y1, y1p = R0 / 2 * (1 - 2 * i2), 0.5 + i2 - R0 * i1
    y2, y2p = R0 / 4 * (i0 * i2 - i1**2), -i0**2 / 4 + i0 * i1 / (2 * R0) - i1**2 / 4
    y3, y3p = -i1, -i0 + i1 / R0
    c1 = -mu**2 * rho0 * I1R / (R0 * I0R**2)
    c2 = mu**2 * rho0 * 2 / I0R**2
    c3 = mu * (I1R / I0R**2 * R1 * rho0 - rho1 / I0R)
    vals = {"u1": c1 * y1, "u2": c2 * y2, "u3": c3 * y3}
    slopes = {"u1": c1 * y1p, "u2": c2 * y2p, "u3": c3 * y3p}
    return vals, slopes


def _assemble(n, params, zeroth, tauexp, fields, g, rho0, rho1, slopes, method):
    """Right side of the first-order amplitude equation at given ``rho0, rho1``."""
    mu, R0, R1 = params.mu, zeroth.R0, tauexp.R1
    cfg = zeroth.cfg
    In = besseli(n, R0, cfg)
    Inp = besseli(1, R0, cfg) if n == 0 else 0.5 * (besseli(n - 1, R0, cfg) + besseli(n + 1, R0, cfg))

    # boundary value of w1 and its coefficient C3 (w1 = C3 I_n)
    w0p_R0 = fields.w0_prime(R0) * rho0
    w1_R0 = (-w0p_R0 * R1 - zeroth.sigma0_prime(R0) * rho1
             - zeroth.sigma0_second(R0) * R1 * rho0 - tauexp.sigma1_prime(R0) * rho0)
    C3 = w1_R0 / In
    w1p_R0 = C3 * Inp

    q1_R0 = (-fields.q0_prime_at_R0 * rho0 * R1 + (n * n - 1) / R0**2 * rho1
             - 2 * (n * n - 1) * R1 / R0**3 * rho0)

    parts = {
        "p0_second": -zeroth.p0_second_at_R0 * rho1,
        "p0_third": -zeroth.p0_third_at_R0 * R1 * rho0,
        "p1_second": -tauexp.p1_second_at_R0 * rho0,
        "q0_second": -fields.q0_second_at_R0 * R1 * rho0,
    }
    if method == "closed_form":
        vals, sl = _n1_particular(params, zeroth, tauexp, rho0, rho1)
        C5 = (q1_R0 - vals["u1"] - vals["u2"] - vals["u3"]) / R0
        parts.update({k: -v for k, v in sl.items()})
        parts["homogeneous_part"] = -C5
    else:
        u4_R0 = q1_R0 + mu * w1_R0
        u4p = n * u4_R0 / R0
        parts.update({k: -v * rho0 for k, v in slopes.items()})
        parts["homogeneous_part"] = -u4p
        parts["w1"] = mu * w1p_R0
    total = sum(parts.values())
    return total, parts, C3


def first_order_coefficients(n: int, params: ModelParams, zeroth: ZerothOrderSolution, tauexp: TauExpansion,
                             method: str | None = None, grid_size: int = 400,
                             richardson: bool = True) -> FirstOrderCoefficients:
    """Coefficients of the linear first-order amplitude equation for mode ``n``.

    ``method`` is ``"closed_form"`` (only for ``n = 1``) or ``"bvp"``;
    by default ``n = 1`` uses the closed form and every other mode the
    finite-difference solves.
    """
    if n < 0:
        raise DomainError("mode index must be non-negative")
    if method is None:
        method = "closed_form" if n == 1 else "bvp"
    if method not in ("closed_form", "bvp"):
        raise DomainError(f"unknown method {method!r}")
    if method == "closed_form" and n != 1:
        raise DomainError("the closed-form path exists only for n = 1")
    fields = mode_zeroth_fields(n, params, zeroth)
    g = growth_rate(n, params, zeroth.R0, zeroth.cfg)
    slopes = {}
    if method == "bvp":
        slopes = _bvp_slopes(n, params, zeroth, fields, g, grid_size, richardson)
    a, _, c3_rho1 = _assemble(n, params, zeroth, tauexp, fields, g, 0.0, 1.0,
                              {k: 0.0 for k in slopes}, method)
    b, parts, c3_rho0 = _assemble(n, params, zeroth, tauexp, fields, g, 1.0, 0.0, slopes, method)
    return FirstOrderCoefficients(n=n, homogeneous=a, forcing=b, method=method, parts=parts,
                                  bvp_derivatives=slopes, C3_rho0=c3_rho0, C3_rho1=c3_rho1)


@dataclass(frozen=True)
class ModeState:
    """Mode ``n`` with its initial amplitudes and derived coefficients."""

    n: int
    rho0_init: float
    rho1_init: float
    growth_rate: float
    C1: float
    C3: tuple
    threshold: float
    coefficients: FirstOrderCoefficients | None = None

    def to_dict(self) -> dict:
        th = self.threshold
        return {
            "n": self.n, "rho0_init": self.rho0_init, "rho1_init": self.rho1_init,
            "growth_rate": self.growth_rate, "C1": self.C1, "C3": list(self.C3),
            "threshold": None if math.isinf(th) else th, "infinite": math.isinf(th),
        }


def make_mode(n: int, params: ModelParams, zeroth: ZerothOrderSolution, tauexp: TauExpansion | None = None,
              rho0_init: float = 1.0, rho1_init: float = 0.0, **kw) -> ModeState:
    """Build a :class:`ModeState`; first-order coefficients need ``tauexp``."""
    fields = mode_zeroth_fields(n, params, zeroth)
    coeffs = None
    c3 = (math.nan, math.nan)
    if tauexp is not None:
        coeffs = first_order_coefficients(n, params, zeroth, tauexp, **kw)
        c3 = (coeffs.C3_rho0, coeffs.C3_rho1)
    return ModeState(
        n=n, rho0_init=float(rho0_init), rho1_init=float(rho1_init),
        growth_rate=growth_rate(n, params, zeroth.R0, zeroth.cfg),
        C1=fields.C1, C3=c3, threshold=mode_threshold(n, zeroth.R0, zeroth.cfg),
        coefficients=coeffs,
    )


def rho0_trajectory(mode: ModeState, t):
    """``rho0(t) = rho0(0) exp(g_n t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    out = mode.rho0_init * np.exp(mode.growth_rate * t)
    return out if out.ndim else float(out)


def rho1_rhs(n: int, t: float, mode: ModeState, params: ModelParams, zeroth: ZerothOrderSolution,
             tauexp: TauExpansion, rho1: float | None = None) -> float:
    """``d rho1 / dt`` at time ``t`` for the current ``rho1`` (default: its initial value)."""
    if mode.n != n:
        raise DomainError("mode index mismatch")
    coeffs = mode.coefficients or first_order_coefficients(n, params, zeroth, tauexp)
    r1 = mode.rho1_init if rho1 is None else rho1
    return coeffs.homogeneous * r1 + coeffs.forcing * rho0_trajectory(mode, t)


def _rk4_propagator(A: np.ndarray, h: float) -> np.ndarray:
    hA = h * A
    I = np.eye(A.shape[0])
    M = I.copy()
    term = I.copy()
    for k in range(1, 5):
        term = term @ hA / k
        M = M + term
    return M


def _system_matrix(coeffs: FirstOrderCoefficients, g: float, forcing: bool) -> np.ndarray:
    return np.array([[g, 0.0], [coeffs.forcing if forcing else 0.0, coeffs.homogeneous]])


@dataclass
class ModeTrajectory:
    """Sampled amplitudes of one mode."""

    n: int
    t: np.ndarray
    rho0: np.ndarray
    rho1: np.ndarray
    tau: float = 0.0

    @property
    def combined(self) -> np.ndarray:
        return self.rho0 + self.tau * self.rho1

    def to_csv(self) -> str:
        lines = ["t,rho0,rho1,combined"]
        for row in zip(self.t, self.rho0, self.rho1, self.combined):
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def default_dt(g: float) -> float:
    return min(0.01, 0.1 / abs(g)) if g != 0.0 else 0.01


def rho1_trajectory(n: int, mode: ModeState, params: ModelParams, t_end: float, dt: float | None = None,
                    forcing: bool = True, step_tol: float = 1e-6) -> ModeTrajectory:
    """Integrate ``(rho0, rho1)`` with the classical RK4 method.

    ``rho0`` is integrated alongside ``rho1`` so that the pair is one
    linear system.  A step-doubling comparison of the one-step
    propagators guards against steps that are too large.
    """
    if mode.coefficients is None:
        raise DomainError("mode lacks first-order coefficients")
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    g = mode.growth_rate
    if dt is None:
        dt = default_dt(g)
    A = _system_matrix(mode.coefficients, g, forcing)
    M = _rk4_propagator(A, dt)
    Mh = _rk4_propagator(A, 0.5 * dt)
    err = np.max(np.abs(M - Mh @ Mh)) / max(np.max(np.abs(M)), 1.0)
    if err > step_tol:
        raise StepSizeError(f"step-doubling discrepancy {err:.2e} exceeds {step_tol:.1e}; reduce dt={dt}")
    steps = int(math.ceil(t_end / dt - 1e-9))
    m00, m01, m10, m11 = (float(v) for v in M.ravel())
    x0, x1 = mode.rho0_init, mode.rho1_init
    r0 = np.empty(steps + 1)
    r1 = np.empty(steps + 1)
    r0[0], r1[0] = x0, x1
    for k in range(1, steps + 1):
        x0, x1 = m00 * x0 + m01 * x1, m10 * x0 + m11 * x1
        r0[k], r1[k] = x0, x1
    t = dt * np.arange(steps + 1)
    return ModeTrajectory(n=n, t=t, rho0=r0, rho1=r1, tau=params.tau)


def tail_decay_rate(t, y, fraction: float = 0.3) -> float:
    """Decay rate from a log-linear least-squares fit over the last ``fraction`` of the series."""
    t = np.asarray(t, float)
    y = np.abs(np.asarray(y, float))
    sel = t >= t[-1] - fraction * (t[-1] - t[0])
    sel &= y > 0
    if sel.sum() < 2:
        raise DomainError("not enough non-zero samples for a tail fit")
    slope = np.polyfit(t[sel], np.log(y[sel]), 1)[0]
    return -float(slope)


def late_growth_rate(coeffs: FirstOrderCoefficients, g: float, tau: float, t1: float, t2: float,
                     dt: float | None = None, rho0: float = 1.0, rho1: float = 0.0,
                     chunk: int = 1000) -> float:
    """Log-growth rate of ``rho0 + tau rho1`` between ``t1`` and ``t2``.

    Propagates the RK4 one-step matrix in chunks with renormalisation, so
    horizons far beyond the overflow range of ``exp(g t)`` are fine.
    """
    if dt is None:
        dt = default_dt(g)
    M = _rk4_propagator(_system_matrix(coeffs, g, True), dt)
    P = np.linalg.matrix_power(M, chunk)
    span = chunk * dt
    x = np.array([rho0, rho1], float)
    logscale = 0.0
    t = 0.0
    marks = {}
    for target in (t1, t2):
        while t + span <= target + 1e-12:
            x = P @ x
            t += span
            s = np.max(np.abs(x))
            logscale += math.log(s)
            x /= s
        rest = int(round((target - t) / dt))
        if rest:
            x = np.linalg.matrix_power(M, rest) @ x
            t += rest * dt
        marks[target] = logscale + math.log(abs(x[0] + tau * x[1]))
    return (marks[t2] - marks[t1]) / (t2 - t1)


def stability_switch(params: ModelParams, zeroth: ZerothOrderSolution, tau: float, mu_lo: float, mu_hi: float,
                     n: int = 2, t1: float = 1e4, t2: float = 2e4, rel_tol: float = 1e-10,
                     grid_size: int = 200, dt: float = 0.05) -> float:
    """Intensity at which ``rho0 + tau rho1`` switches from decay to growth.

    ``tauexp`` is rebuilt for each trial intensity since ``R1`` scales
    with ``mu``.
    """
    from .stationary import build_zeroth, compute_tau_expansion

    def rate(mu):
        p = params.with_(mu=mu, tau=tau)
        z = build_zeroth(p, zeroth.cfg, R0=zeroth.R0)
        te = compute_tau_expansion(p, z)
        c = first_order_coefficients(n, p, z, te, grid_size=grid_size)
        g = growth_rate(n, p, z.R0, z.cfg)
        return late_growth_rate(c, g, tau, t1, t2, dt=dt)

    lo, hi = mu_lo, mu_hi
    if not (rate(lo) < 0.0 < rate(hi)):
        raise ConvergenceError("switch not bracketed by the given intensities")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if rate(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fitted_delta(params: ModelParams, R0: float, n_fit: int = 2, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Largest ``delta`` with ``g_n <= -delta n^3`` at ``n = n_fit``."""
    return -growth_rate(n_fit, params, R0, cfg) / n_fit**3
