"""Exact Riemann solution of the 1D isothermal Euler equations (p = c^2 rho).

Used as the reference for the weak density discontinuity. Pressure is reported
normalized as ``(p - p_right) / (drho * c^2)``, which maps the initial left
and right states to 1 and 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RiemannSetup:
    rho_left: float
    rho_right: float
    cs: float
    t: float
    x0: float = 0.0
    u_left: float = 0.0
    u_right: float = 0.0

    def __post_init__(self):
        if self.rho_left <= 0 or self.rho_right <= 0:
            raise ValueError("densities must be positive")
        if self.t < 0:
            raise ValueError("time must be non-negative")

    @property
    def delta_rho(self) -> float:
        return self.rho_left - self.rho_right


def _wave_velocity_jump(rho_star, rho_k, c):
    """Velocity change across a shock (rho_star > rho_k) or rarefaction."""
    if rho_star > rho_k:
        return c * (rho_star - rho_k) / math.sqrt(rho_star * rho_k)
    return c * math.log(rho_star / rho_k)


def star_density(setup: RiemannSetup, tol: float = 1e-14) -> float:
    """Bisection on the velocity-matching function for the star density."""
    c = setup.cs
    du = setup.u_right - setup.u_left

    def mismatch(r):
        return (_wave_velocity_jump(r, setup.rho_left, c)
                + _wave_velocity_jump(r, setup.rho_right, c) + du)

    lo = min(setup.rho_left, setup.rho_right) * 1e-6
    hi = max(setup.rho_left, setup.rho_right)
    while mismatch(hi) < 0:
        hi *= 2.0
    if mismatch(lo) > 0:
        # isothermal rarefactions only reach rho = 0 asymptotically
        raise ValueError("star density below 1e-6 of the initial states (near vacuum)")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mismatch(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sample(setup: RiemannSetup, x) -> tuple[np.ndarray, np.ndarray]:
    """Density and velocity at positions ``x`` and time ``setup.t``."""
    x = np.asarray(x, dtype=float)
    c, rl, rr, ul, ur = setup.cs, setup.rho_left, setup.rho_right, setup.u_left, setup.u_right
    if setup.t == 0 or rl == rr and ul == ur:
        left = x <= setup.x0
        return np.where(left, rl, rr), np.where(left, ul, ur)
    rs = star_density(setup)
    us = ul - _wave_velocity_jump(rs, rl, c)
    xi = (x - setup.x0) / setup.t
    rho = np.empty_like(xi)
    u = np.empty_like(xi)

    # left wave
    if rs > rl:
        s = ul - c * math.sqrt(rs / rl)
        lmask = xi < s
        rho[lmask], u[lmask] = rl, ul
        fan = np.zeros_like(lmask)
    else:
        head, tail = ul - c, us - c
        lmask = xi < head
        rho[lmask], u[lmask] = rl, ul
        fan = (xi >= head) & (xi < tail)
        u[fan] = xi[fan] + c
        rho[fan] = rl * np.exp((ul - u[fan]) / c)
    # right wave
    if rs > rr:
        s = ur + c * math.sqrt(rs / rr)
        rmask = xi > s
        rfan = np.zeros_like(rmask)
    else:
        head, tail = ur + c, us + c
        rmask = xi > head
        rfan = (xi > tail) & (xi <= head)
        u[rfan] = xi[rfan] - c
        rho[rfan] = rr * np.exp((u[rfan] - ur) / c)
    rho[rmask], u[rmask] = rr, ur
    star = ~(lmask | fan | rmask | rfan)
    rho[star], u[star] = rs, us
    return rho, u


def solve(setup: RiemannSetup, x) -> tuple[np.ndarray, np.ndarray]:
    """Normalized pressure and velocity of the exact solution."""
    rho, u = sample(setup, x)
    drho = setup.delta_rho
    if drho == 0:
        return np.zeros_like(rho), u
    return (rho - setup.rho_right) / drho, u


def solve_acoustic(setup: RiemannSetup, x) -> tuple[np.ndarray, np.ndarray]:
    """Linear-acoustics limit: two fronts at ``x0 -/+ c t`` around a half-jump plateau."""
    x = np.asarray(x, dtype=float)
    c, t = setup.cs, setup.t
    rho0 = setup.rho_right
    drho = setup.delta_rho
    p = np.where(x < setup.x0 - c * t, 1.0, np.where(x > setup.x0 + c * t, 0.0, 0.5))
    u = np.where(np.abs(x - setup.x0) <= c * t, c * drho / (2.0 * rho0), 0.0)
    if drho == 0:
        p = np.zeros_like(x)
    return p, u
