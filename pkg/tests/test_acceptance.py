"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import math
import time

import numpy as np
import pytest
from scipy.special import iv

from fbtumor import (
    ModelParams,
    P0,
    RadialGridFunction,
    SimConfig,
    build_zeroth,
    compute_tau_expansion,
    fixed_point_solve,
    growth_rate,
    make_mode,
    mode_threshold,
    mu_star,
    rho1_trajectory,
    run_to_steady,
    solve_Ln_bvp,
    solve_R0,
    verify_identities,
)
from fbtumor.perturbation import mode_zeroth_fields, rho1_rhs, stability_switch, tail_decay_rate
from fbtumor.stationary import FixedPointConfig, solve_pressure_at_radius

RECURRENCES = ("lower_recurrence", "upper_recurrence", "integral_form", "three_term")


def report(number, title, ok, elapsed, limit, detail, capsys=None):
    ok = ok and elapsed < limit
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'}  {title}  [{elapsed:.2f}s < {limit:g}s]  {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    x = np.linspace(10.0 / 200, 10.0, 200)
    rep = verify_identities(x, 8)
    worst = max(rep.residuals[k] for k in RECURRENCES)
    ok = worst < 1e-12 and all(rep.inequalities.values())
    return ok, time.perf_counter() - t0, 1.0, f"max recurrence residual {worst:.2e}, inequalities {rep.inequalities}"


def _fd4(f, r, h):
    d1 = (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h)
    d2 = (-f(r - 2 * h) + 16 * f(r - h) - 30 * f(r) + 16 * f(r + h) - f(r + 2 * h)) / (12 * h * h)
    return d1, d2


def criterion_2():
    t0 = time.perf_counter()
    root_res = pde_res = 0.0
    for st in np.arange(1, 10) / 10:
        p = ModelParams(mu=1.0, sigma_tilde=st)
        z = build_zeroth(p)
        root_res = max(root_res, abs(P0(z.R0) - st / 2))
        r = np.linspace(0.1, 0.9, 9) * z.R0
        h = 1e-3
        d1, d2 = _fd4(z.p0, r, h)
        pde_res = max(pde_res, float(np.max(np.abs(-d2 - d1 / r - p.mu * (z.sigma0(r) - st)))))
        s1, s2 = _fd4(z.sigma0, r, h)
        pde_res = max(pde_res, float(np.max(np.abs(s2 + s1 / r - z.sigma0(r)))))
    ok = root_res < 1e-12 and pde_res < 1e-8
    return ok, time.perf_counter() - t0, 1.0, f"root residual {root_res:.2e}, PDE residual {pde_res:.2e}"


def criterion_3():
    t0 = time.perf_counter()
    positive = linear = True
    for st in (0.2, 0.5, 0.8):
        for mu in (0.1, 1.0, 5.0):
            p = ModelParams(mu=mu, sigma_tilde=st)
            z = build_zeroth(p)
            r1 = compute_tau_expansion(p, z).R1
            p2 = p.with_(mu=2 * mu)
            r2 = compute_tau_expansion(p2, build_zeroth(p2)).R1
            positive &= r1 > 0
            linear &= abs(r2 - 2 * r1) <= 4 * np.finfo(float).eps * r2
    p = ModelParams(mu=1.0, sigma_tilde=0.5)
    z = build_zeroth(p)
    te = compute_tau_expansion(p, z)
    gaps = [abs(fixed_point_solve(p.with_(tau=t)).R_star - te.radius(t)) for t in (0.02, 0.01, 0.005)]
    ratios = [gaps[0] / gaps[1], gaps[1] / gaps[2]]
    ok = positive and linear and all(3.5 <= q <= 4.5 for q in ratios)
    detail = f"R1>0 {positive}, linear {linear}, Richardson ratios {ratios[0]:.3f} {ratios[1]:.3f}"
    return ok, time.perf_counter() - t0, 30.0, detail


def criterion_4():
    t0 = time.perf_counter()
    p = ModelParams(mu=1.0, sigma_tilde=0.5)
    ratios = [fixed_point_solve(p.with_(tau=t)).contraction_estimate for t in (0.02, 0.01, 0.005)]
    q = p.with_(tau=0.02)
    # constant starts share p' = 0 and coincide after one map; add a non-constant start
    x = np.linspace(0.0, 2.0, 257)
    bump = RadialGridFunction(2.0, 1.0 + 0.5 * np.cos(np.pi * x) + 0.3 * x**2)
    a = fixed_point_solve(q, p_init=1.0)
    b = fixed_point_solve(q, p_init=bump)
    cfg = FixedPointConfig()
    s1 = solve_pressure_at_radius(a.R_star, q, cfg, p_init=1.0).state
    s0 = solve_pressure_at_radius(a.R_star, q, cfg, p_init=0.0).state
    sb = solve_pressure_at_radius(a.R_star, q, cfg, p_init=bump).state
    dist = max(s1.sup_distance(s0), s1.sup_distance(sb), abs(a.R_star - b.R_star),
               float(np.max(np.abs(a.p_grid.values - b.p_grid.values))))
    ok = all(r < 1 for r in ratios) and ratios[0] > ratios[1] > ratios[2] and dist < 1e-8
    detail = "ratios " + " ".join(f"{r:.4f}" for r in ratios) + f", two-start distance {dist:.2e}"
    return ok, time.perf_counter() - t0, 30.0, detail


def criterion_5():
    t0 = time.perf_counter()
    R0 = solve_R0(0.5)
    mus = np.linspace(0.1, 10.0, 20)
    g1 = max(abs(growth_rate(1, ModelParams(m, 0.5), R0)) for m in mus)
    g0 = max(growth_rate(0, ModelParams(m, 0.5), R0) for m in mus)
    th = [mode_threshold(n, R0) for n in range(2, 17)]
    increasing = all(a < b for a, b in zip(th, th[1:]))
    ms = mu_star(R0)

    def g2(mu):
        return growth_rate(2, ModelParams(mu, 0.5), R0)

    lo, hi = 0.5 * ms, 2.0 * ms
    assert g2(lo) < 0 < g2(hi)
    while hi - lo >= 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if g2(mid) < 0 else (lo, mid)
    width = (hi - lo) / hi
    ok = (g1 < 1e-13 and g0 < 0 and increasing and ms == th[0]
          and lo <= ms <= hi and g2(lo) < 0 < g2(hi) and width < 1e-10)
    detail = f"max|g1| {g1:.1e}, max g0 {g0:.3f}, increasing {increasing}, mu*={ms:.12f} bracket {width:.1e}"
    return ok, time.perf_counter() - t0, 5.0, detail


def _envelope_ok(tr, b, g):
    d = -g
    C = abs(tr.rho1[0]) + abs(b * tr.rho0[0]) / (math.e * 0.1 * d)
    return bool(np.all(np.abs(tr.rho1) <= C * np.exp(-0.9 * d * tr.t) * (1 + 1e-9)))


def criterion_6():
    t0 = time.perf_counter()
    drift = 0.0
    for mu, st, r0, r1 in ((0.3, 0.3, 1.0, -0.5), (1.0, 0.5, -2.0, 0.7), (4.0, 0.8, 0.4, 1.3)):
        p = ModelParams(mu, st)
        z = build_zeroth(p)
        te = compute_tau_expansion(p, z)
        m = make_mode(1, p, z, te, rho0_init=r0, rho1_init=r1)
        drift = max(drift, abs(rho1_rhs(1, 0.0, m, p, z, te)))
    base = ModelParams(1.0, 0.5)
    R0 = solve_R0(0.5)
    cases = {0: base, 2: base.with_(mu=0.5 * mu_star(R0))}
    rate_err, envelope = {}, {}
    for n, p in cases.items():
        z = build_zeroth(p)
        te = compute_tau_expansion(p, z)
        I0, I1, In, In1 = iv(0, R0), iv(1, R0), iv(n, R0), iv(n + 1, R0)
        closed = -(p.mu * (1 - 2 * I1 / (R0 * I0) - I1 * In1 / (I0 * In)) - n * (n * n - 1) / R0**3)
        m = make_mode(n, p, z, te, rho0_init=1.0, rho1_init=1.0)
        horizon = 30.0 / closed
        free = rho1_trajectory(n, m, p, horizon, forcing=False)
        rate_err[n] = abs(tail_decay_rate(free.t, free.rho1) / closed - 1)
        forced = rho1_trajectory(n, m, p, horizon)
        envelope[n] = _envelope_ok(forced, m.coefficients.forcing, m.growth_rate)
    ok = drift < 1e-9 and all(e < 0.05 for e in rate_err.values()) and all(envelope.values())
    detail = (f"n=1 drift {drift:.1e}, rate errors " + " ".join(f"n={k}:{v:.1e}" for k, v in rate_err.items())
              + f", envelopes {envelope}")
    return ok, time.perf_counter() - t0, 60.0, detail


def criterion_7():
    t0 = time.perf_counter()
    p = ModelParams(1.0, 0.5)
    z = build_zeroth(p)
    ms = mu_star(z.R0)
    s0 = stability_switch(p, z, 0.0, 0.9 * ms, 1.1 * ms)
    s1 = stability_switch(p, z, 0.01, 0.9 * ms, 1.1 * ms)
    shift = abs(s1 - s0) / ms
    ok = shift < 1e-3
    return ok, time.perf_counter() - t0, 120.0, f"switch tau=0 {s0:.10f}, tau=0.01 {s1:.10f}, shift {shift:.1e} mu*"


def criterion_8():
    t0 = time.perf_counter()
    tau = 0.1
    R0 = solve_R0(0.5)
    ms = mu_star(R0)
    worst_gap = worst_end = 0.0
    rows = []
    for factor in (0.5, 2.0):
        p = ModelParams(factor * ms, 0.5, tau)
        Rs = fixed_point_solve(p).R_star
        for f in (0.5, 1.5):
            tr = run_to_steady(f * Rs, p, SimConfig(dt=tau / 8, t_end=200.0), R_reference=Rs)
            gap = abs(tr.R - Rs)
            worst_gap = max(worst_gap, gap)
            worst_end = max(worst_end, tr.max_endpoint_error())
            rows.append(f"{factor}mu*/{f}R*: {gap:.1e}")
    ok = worst_gap < 1e-5 and worst_end < 1e-6
    return ok, time.perf_counter() - t0, 120.0, f"gaps [{', '.join(rows)}], max endpoint error {worst_end:.1e}"


def _manufactured_error(n, N, R):
    r = np.linspace(0.0, R, N + 1)
    if n == 0:
        exact = np.cos(r)
        rr = np.where(r > 0, r, 1.0)
        b = np.cos(r) + np.where(r > 0, np.sin(r) / rr, 1.0)
    else:
        exact = R * r**n - r ** (n + 1)
        b = (2 * n + 1) * r ** (n - 1)
    sol = solve_Ln_bvp(n, RadialGridFunction(R, b), float(exact[-1]), R).solution.values
    return float(np.max(np.abs(sol - exact)))


def criterion_9():
    t0 = time.perf_counter()
    p = ModelParams(1.0, 0.5)
    z = build_zeroth(p)
    R = z.R0
    grids = (100, 200, 400)
    ratios = {}
    for n in (0, 2, 5):
        e = [_manufactured_error(n, N, R) for N in grids]
        ratios[n] = [e[0] / e[1], e[1] / e[2]]
    f = mode_zeroth_fields(2, p, z)
    qerr = []
    for N in grids:
        r = np.linspace(0.0, R, N + 1)
        sol = solve_Ln_bvp(2, RadialGridFunction(R, p.mu * f.w0(r)), 3.0 / R**2, R).solution.values
        qerr.append(float(np.max(np.abs(sol - f.q0(r)))))
    ratios["q2"] = [qerr[0] / qerr[1], qerr[1] / qerr[2]]
    ok = all(3.6 <= q <= 4.4 for v in ratios.values() for q in v)
    detail = ", ".join(f"{k}: " + "/".join(f"{q:.3f}" for q in v) for k, v in ratios.items())
    return ok, time.perf_counter() - t0, 10.0, detail + f", q2 error at N=400 {qerr[-1]:.1e}"


CRITERIA = [
    (1, "Bessel identity suite", criterion_1),
    (2, "Stationary zeroth order", criterion_2),
    (3, "First-order radius and Richardson ratio", criterion_3),
    (4, "Fixed-point contraction", criterion_4),
    (5, "Mode spectrum and critical intensity", criterion_5),
    (6, "First-order mode dynamics", criterion_6),
    (7, "Threshold invariance under delay", criterion_7),
    (8, "Dynamic radial oracle", criterion_8),
    (9, "BVP solver order", criterion_9),
]


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(number, title, fn, capsys):
    ok, elapsed, limit, detail = fn()
    assert report(number, title, ok, elapsed, limit, detail, capsys), detail


if __name__ == "__main__":
    results = [report(num, title, *fn()) for num, title, fn in CRITERIA]
    raise SystemExit(0 if all(results) else 1)
