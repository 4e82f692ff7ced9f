import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlbdecomp.riemann import RiemannSetup, sample, solve, solve_acoustic, star_density

CS = math.sqrt(1 / 3)


def test_no_jump_is_quiescent():
    x = np.linspace(0, 100, 51)
    p, u = solve(RiemannSetup(1.0, 1.0, CS, 50.0, x0=50.0), x)
    assert not p.any() and not u.any()


def test_weak_jump_matches_linear_acoustics():
    d = 5e-5
    setup = RiemannSetup(1.0 + d, 1.0, CS, 200.0, x0=250.5)
    x = np.arange(1, 501, dtype=float)
    p, u = solve(setup, x)
    pa, ua = solve_acoustic(setup, x)
    centre = 250
    assert p[centre] == pytest.approx(0.5, rel=1e-4)
    assert u[centre] == pytest.approx(CS * d / 2, rel=1e-4)
    # away from the fronts the two agree to the weak-wave limit
    far = np.abs(np.abs(x - 250.5) - CS * 200) > 2
    np.testing.assert_allclose(p[far], pa[far], rtol=1e-4, atol=1e-4)
    np.testing.assert_allclose(u[far], ua[far], rtol=1e-4, atol=1e-4 * CS * d)


def test_far_field_unperturbed():
    setup = RiemannSetup(1.1, 1.0, CS, 10.0, x0=0.0)
    p, u = solve(setup, np.array([-20.0, 20.0]))
    np.testing.assert_allclose(p, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(u, [0.0, 0.0], atol=1e-15)


def test_strong_jump_satisfies_jump_conditions():
    # independent checks: Rankine-Hugoniot across the shock, Riemann invariant across the fan
    rl, rr = 2.0, 1.0
    setup = RiemannSetup(rl, rr, CS, 1.0)
    rs = star_density(setup)
    assert rr < rs < rl
    rho_star, u_star = sample(setup, np.array([0.0]))
    s = CS * math.sqrt(rs / rr)
    assert rr * (0.0 - s) == pytest.approx(rho_star[0] * (u_star[0] - s), rel=1e-12)
    assert CS**2 * rr == pytest.approx(rho_star[0] * u_star[0] * (u_star[0] - s) + CS**2 * rho_star[0], rel=1e-12)
    assert u_star[0] + CS * math.log(rho_star[0]) == pytest.approx(CS * math.log(rl), rel=1e-12)
    xs = np.linspace(-CS * 0.99, u_star[0] - CS, 7)
    rho_fan, u_fan = sample(setup, xs)
    np.testing.assert_allclose(u_fan + CS * np.log(rho_fan), CS * math.log(rl), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(d=st.floats(1e-6, 0.5), t=st.floats(1.0, 300.0))
def test_monotone_and_self_similar(d, t):
    setup = RiemannSetup(1.0 + d, 1.0, CS, t)
    x = np.linspace(-2 * t, 2 * t, 401)
    p, u = solve(setup, x)
    assert np.all(np.diff(p) <= 1e-12)
    p2, u2 = solve(RiemannSetup(1.0 + d, 1.0, CS, 2 * t), 2 * x)
    np.testing.assert_allclose(p2, p, atol=1e-12)
    np.testing.assert_allclose(u2, u, atol=1e-14)


def test_invalid_setups():
    with pytest.raises(ValueError):
        RiemannSetup(0.0, 1.0, CS, 1.0)
    with pytest.raises(ValueError):
        RiemannSetup(1.0, 1.0, CS, -1.0)
    with pytest.raises(ValueError):
        star_density(RiemannSetup(1.0, 1.0, CS, 1.0, u_left=-50.0, u_right=50.0))
