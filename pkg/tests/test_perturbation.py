import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import iv

from fbtumor import (
    ModelParams,
    RadialGridFunction,
    build_zeroth,
    classify,
    compute_tau_expansion,
    first_order_coefficients,
    growth_rate,
    make_mode,
    mode_threshold,
    mu_star,
    rho0_trajectory,
    rho1_trajectory,
    solve_Ln_bvp,
    solve_R0,
)
from fbtumor.errors import DomainError, StepSizeError
from fbtumor.perturbation import (
    fitted_delta,
    late_growth_rate,
    mode_zeroth_fields,
    rho1_rhs,
    stability_bracket,
    tail_decay_rate,
)

# mpmath (40 digits) evaluation at the findroot radius, frozen
MU2_HALF = 1.3899246738551866757
MU3_HALF = 3.3740994473509592409
MU2_03 = 0.24759153169303806983
N0_BRACKET_HALF = -0.19132909860844863162
# forcing coefficients from unextrapolated grids 12800/25600, Richardson-combined
FORCING_ORACLE = {0: 0.0013977102605166418, 2: 0.07734578496422341, 3: 0.29392447759711754}


@pytest.fixture(scope="module")
def base():
    p = ModelParams(mu=1.0, sigma_tilde=0.5)
    z = build_zeroth(p)
    return p, z, compute_tau_expansion(p, z)


def closed_rate(n, mu, R0):
    """Growth rate evaluated with scipy Bessel values."""
    I0, I1, In, In1 = iv(0, R0), iv(1, R0), iv(n, R0), iv(n + 1, R0)
    return mu * (1 - 2 * I1 / (R0 * I0) - I1 * In1 / (I0 * In)) - n * (n * n - 1) / R0**3


def test_thresholds_golden():
    R0 = solve_R0(0.5)
    assert mode_threshold(2, R0) == pytest.approx(MU2_HALF, rel=1e-13)
    assert mode_threshold(3, R0) == pytest.approx(MU3_HALF, rel=1e-13)
    assert mu_star(R0) == mode_threshold(2, R0)
    assert mu_star(solve_R0(0.3)) == pytest.approx(MU2_03, rel=1e-12)


def test_threshold_infinite_for_low_modes():
    assert mode_threshold(0, 3.0) == math.inf
    assert mode_threshold(1, 3.0) == math.inf
    with pytest.raises(DomainError):
        mode_threshold(-1, 3.0)


def test_min_threshold_at_two_by_scan():
    R0 = solve_R0(0.3)
    th = [mode_threshold(n, R0) for n in range(2, 33)]
    assert int(np.argmin(th)) == 0


def test_growth_rate_against_scipy(base):
    p, z, _ = base
    for n in range(0, 9):
        assert growth_rate(n, p, z.R0) == pytest.approx(closed_rate(n, p.mu, z.R0), abs=1e-12)


def test_growth_rate_n1_vanishes():
    R0 = solve_R0(0.5)
    for mu in np.linspace(0.05, 20.0, 20):
        assert abs(growth_rate(1, ModelParams(mu, 0.5), R0)) < 1e-13


def test_growth_rate_n0_negative(base):
    p, z, _ = base
    assert growth_rate(0, p, z.R0) == pytest.approx(N0_BRACKET_HALF, rel=1e-13)


def test_growth_rate_zero_at_threshold(base):
    p, z, _ = base
    mu2 = mode_threshold(2, z.R0)
    assert abs(growth_rate(2, p.with_(mu=mu2), z.R0)) < 1e-10


def test_signs_around_mu_star(base):
    p, z, _ = base
    ms = mu_star(z.R0)
    below = p.with_(mu=ms * (1 - 1e-3))
    above = p.with_(mu=ms * (1 + 1e-3))
    assert all(growth_rate(n, below, z.R0) < 0 for n in range(2, 17))
    assert growth_rate(2, above, z.R0) > 0


def test_classify():
    assert classify(1e-3) == "unstable"
    assert classify(-1e-3) == "stable"
    assert classify(0.0) == "neutral"


def test_rho0_trajectory(base):
    p, z, te = base
    m = make_mode(1, p, z, rho0_init=0.3)
    t = np.linspace(0, 50, 11)
    np.testing.assert_allclose(rho0_trajectory(m, t), 0.3, rtol=1e-12)
    m0 = make_mode(2, p, z, rho0_init=0.0)
    assert np.all(rho0_trajectory(m0, t) == 0.0)
    with pytest.raises(DomainError):
        rho0_trajectory(m, -1.0)


def test_decay_envelope_across_modes(base):
    p, z, _ = base
    q = p.with_(mu=0.5 * mu_star(z.R0))
    delta = fitted_delta(q, z.R0)
    assert delta > 0
    m = make_mode(2, q, z, rho0_init=1.0)
    t = np.linspace(0, 40, 41)
    assert np.all(np.abs(rho0_trajectory(m, t)) <= np.exp(-delta * 8 * t) * (1 + 1e-12))
    for n in range(3, 9):
        assert growth_rate(n, q, z.R0) <= -delta * n**3


def test_mode_fields_boundary_data(base):
    p, z, _ = base
    for n in (0, 2, 3, 5):
        f = mode_zeroth_fields(n, p, z)
        R0 = z.R0
        assert f.q0(R0) == pytest.approx((n * n - 1) / R0**2, abs=1e-13)
        I0, I1, In, In1 = iv(0, R0), iv(1, R0), iv(n, R0), iv(n + 1, R0)
        qp = n * (n * n - 1) / R0**3 + p.mu * I1 * In1 / (I0 * In)
        assert f.q0_prime_at_R0 == pytest.approx(qp, abs=1e-12)
        h = 1e-5
        assert abs((f.q0(R0 + h) - f.q0(R0 - h)) / (2 * h) - f.q0_prime_at_R0) < 1e-8
        assert abs((f.q0_prime(R0 + h) - f.q0_prime(R0 - h)) / (2 * h) - f.q0_second_at_R0) < 1e-8
        w0, q0, C1, qp_, qpp = f
        assert C1 == f.C1 and qp_ == f.q0_prime_at_R0


def test_mode_fields_n1_closed_form(base):
    p, z, _ = base
    f = mode_zeroth_fields(1, p, z)
    r = np.linspace(0.0, z.R0, 9)
    I0R, I1R = iv(0, z.R0), iv(1, z.R0)
    ref = -p.mu * I1R / (z.R0 * I0R) * r + p.mu * iv(1, r) / I0R
    np.testing.assert_allclose(f.q0(r), ref, atol=1e-13)


def _bvp_error(n, N, R0):
    r = np.linspace(0.0, R0, N + 1)
    if n == 0:
        exact = np.cos(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.cos(r) + np.where(r > 0, np.sin(r) / np.where(r > 0, r, 1.0), 1.0)
    else:
        exact = R0 * r**n - r ** (n + 1)
        b = (2 * n + 1) * r ** (n - 1)
    res = solve_Ln_bvp(n, RadialGridFunction(R0, b), float(exact[-1]), R0)
    assert res.solution.values[-1] == exact[-1]
    return float(np.max(np.abs(res.solution.values - exact)))


@pytest.mark.parametrize("n", [0, 2, 5])
def test_bvp_manufactured_second_order(n):
    R0 = solve_R0(0.5)
    errs = [_bvp_error(n, N, R0) for N in (100, 200, 400)]
    for a, b in zip(errs, errs[1:]):
        assert 3.6 <= a / b <= 4.4


def test_bvp_zero_data():
    res = solve_Ln_bvp(3, RadialGridFunction(2.0, np.zeros(129)), 0.0, 2.0)
    assert np.all(res.solution.values == 0.0)
    assert res.boundary_derivative == 0.0


def test_bvp_reproduces_q0(base):
    p, z, _ = base
    f = mode_zeroth_fields(2, p, z)
    errs = []
    for N in (100, 200, 400):
        r = np.linspace(0.0, z.R0, N + 1)
        res = solve_Ln_bvp(2, RadialGridFunction(z.R0, p.mu * f.w0(r)), 3.0 / z.R0**2, z.R0)
        assert res.residual < 1e-8
        errs.append(float(np.max(np.abs(res.solution.values - f.q0(r)))))
    assert 3.6 <= errs[0] / errs[1] <= 4.4 and 3.6 <= errs[1] / errs[2] <= 4.4


def test_bvp_rejects_wrong_domain():
    with pytest.raises(DomainError):
        solve_Ln_bvp(2, RadialGridFunction(1.0, np.zeros(65)), 0.0, 2.0)


def test_homogeneous_coefficient_is_growth_rate(base):
    p, z, te = base
    for n in range(0, 5):
        c = first_order_coefficients(n, p, z, te)
        assert c.homogeneous == pytest.approx(growth_rate(n, p, z.R0), abs=1e-14)


@pytest.mark.parametrize("n", [0, 2, 3])
def test_forcing_against_fine_grid_oracle(base, n):
    p, z, te = base
    assert first_order_coefficients(n, p, z, te).forcing == pytest.approx(FORCING_ORACLE[n], abs=2e-7)


def test_n1_closed_form_and_bvp_agree(base):
    p, z, te = base
    cf = first_order_coefficients(1, p, z, te)
    bvp = first_order_coefficients(1, p, z, te, method="bvp", grid_size=800)
    assert abs(cf.forcing) < 1e-12
    assert abs(cf.forcing - bvp.forcing) < 1e-7
    with pytest.raises(DomainError):
        first_order_coefficients(2, p, z, te, method="closed_form")


def test_rho1_rhs_cases(base):
    p, z, te = base
    m2 = make_mode(2, p, z, te, rho0_init=0.0, rho1_init=0.7)
    g2 = growth_rate(2, p, z.R0)
    assert rho1_rhs(2, 3.0, m2, p, z, te) == pytest.approx(g2 * 0.7, rel=1e-14)
    m0 = make_mode(0, p, z, te, rho0_init=0.0, rho1_init=1.0)
    ref = -p.mu * (-1 + 2 * iv(1, z.R0) / (z.R0 * iv(0, z.R0)) + (iv(1, z.R0) / iv(0, z.R0)) ** 2)
    assert rho1_rhs(0, 0.0, m0, p, z, te) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(mu=st.floats(min_value=0.05, max_value=5.0), s=st.floats(min_value=0.1, max_value=0.9),
       r0=st.floats(min_value=-2.0, max_value=2.0), r1=st.floats(min_value=-2.0, max_value=2.0))
def test_n1_drift_vanishes_property(mu, s, r0, r1):
    p = ModelParams(mu=mu, sigma_tilde=s)
    z = build_zeroth(p)
    te = compute_tau_expansion(p, z)
    m = make_mode(1, p, z, te, rho0_init=r0, rho1_init=r1)
    assert abs(rho1_rhs(1, 0.0, m, p, z, te)) < 1e-9


def test_rho1_trajectory_n1_constant(base):
    p, z, te = base
    m = make_mode(1, p, z, te, rho0_init=1.0, rho1_init=0.4)
    tr = rho1_trajectory(1, m, p, 20.0)
    assert np.max(np.abs(tr.rho1 - 0.4)) < 1e-9


def test_rho1_trajectory_n0_rate_without_forcing(base):
    p, z, te = base
    m = make_mode(0, p, z, te, rho0_init=1.0, rho1_init=1.0)
    tr = rho1_trajectory(0, m, p, 60.0, forcing=False)
    rate = tail_decay_rate(tr.t, tr.rho1)
    assert rate == pytest.approx(-closed_rate(0, p.mu, z.R0), rel=0.05)


def test_rho1_trajectory_n2_decay(base):
    p, z, te = base
    q = p.with_(mu=0.5 * mu_star(z.R0))
    zq = build_zeroth(q)
    teq = compute_tau_expansion(q, zq)
    m = make_mode(2, q, zq, teq, rho0_init=1.0, rho1_init=0.0)
    tr = rho1_trajectory(2, m, q, 200.0)
    g = growth_rate(2, q, zq.R0)
    assert tail_decay_rate(tr.t, tr.rho1) >= 0.9 * (-g)


def test_rho1_homogeneous_rate_within_two_percent(base):
    p, z, te = base
    m = make_mode(3, p, z, te, rho0_init=0.0, rho1_init=1.0)
    tr = rho1_trajectory(3, m, p, 30.0)
    assert tail_decay_rate(tr.t, tr.rho1) == pytest.approx(-m.growth_rate, rel=0.02)


def test_rho1_trajectory_step_guard_and_csv(base):
    p, z, te = base
    m = make_mode(3, p, z, te)
    with pytest.raises(StepSizeError):
        rho1_trajectory(3, m, p, 10.0, dt=2.0)
    with pytest.raises(DomainError):
        rho1_trajectory(3, make_mode(3, p, z), p, 10.0)
    tr = rho1_trajectory(3, m, p, 0.05)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t,rho0,rho1,combined" and len(lines) == tr.t.size + 1


def test_mode_state_to_dict(base):
    p, z, te = base
    d = make_mode(0, p, z).to_dict()
    assert d["threshold"] is None and d["infinite"] is True


@pytest.mark.parametrize("tau", [0.0, 1e-3, 1e-2])
def test_combined_amplitude_switch(base, tau):
    p, z, _ = base
    ms = mu_star(z.R0)
    rates = []
    for mu in (ms * 0.99, ms * 1.01):
        q = p.with_(mu=mu, tau=tau)
        zq = build_zeroth(q, R0=z.R0)
        c = first_order_coefficients(2, q, zq, compute_tau_expansion(q, zq), grid_size=200)
        rates.append(late_growth_rate(c, growth_rate(2, q, z.R0), tau, 1e3, 2e3, dt=0.05))
    assert rates[0] < 0 < rates[1]


@settings(max_examples=60, deadline=None)
@given(x=st.floats(min_value=0.05, max_value=10.0), n=st.integers(min_value=2, max_value=12))
def test_bracket_positive_property(x, n):
    assert stability_bracket(n, x) > 0


@settings(max_examples=60, deadline=None)
@given(x=st.floats(min_value=0.05, max_value=10.0))
def test_n0_bracket_negative_property(x):
    assert stability_bracket(0, x) < 0


@settings(max_examples=15, deadline=None)
@given(s=st.floats(min_value=0.1, max_value=0.9))
def test_threshold_monotone_property(s):
    R0 = solve_R0(s)
    th = [mode_threshold(n, R0) for n in range(2, 17)]
    assert all(a < b for a, b in zip(th, th[1:]))
