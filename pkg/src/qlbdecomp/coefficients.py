"""Coefficient tensors of the quadratic collision form.

The equilibrium is written as ``f_eq_i = (1/rho) sum_{j<=k} alpha_ijk f_j f_k`` and
the BGK collision as ``f*_i = (1/rho) sum_{j<=k} beta_ijk f_j f_k``. Tensors are
stored densely for every (i, j, k); the ``j <= k`` restriction is applied by
``chi`` where they are consumed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeModel

DT = 1.0
TAU_MIN = 0.5


class StabilityError(ValueError):
    """Raised for relaxation times below the BGK stability bound."""


@dataclass(frozen=True)
class AlphaTensor:
    values: np.ndarray  # (n_e, n_e, n_e)
    lattice: LatticeModel


@dataclass(frozen=True)
class BetaTensor:
    values: np.ndarray  # (n_e, n_e, n_e)
    tau: float
    lattice: LatticeModel
    dt: float = DT


def check_tau(tau: float) -> float:
    tau = float(tau)
    if not tau >= TAU_MIN:
        raise StabilityError(f"tau={tau} is below the BGK stability bound {TAU_MIN}")
    return tau


def tau_from_viscosity(nu: float) -> float:
    """Relaxation time in lattice units, ``tau = 3 nu + 0.5``."""
    if not nu > 0:
        raise ValueError(f"viscosity must be positive, got {nu}")
    return 3.0 * nu + 0.5


def chi(n_e: int) -> np.ndarray:
    """Upper-triangular indicator ``chi_jk = [j <= k]``."""
    return np.triu(np.ones((n_e, n_e)))


def gamma(n_e: int) -> np.ndarray:
    d = np.eye(n_e)
    return d[:, :, None] + d[:, None, :] - d[:, :, None] * d[:, None, :]


def alpha(lattice: LatticeModel) -> AlphaTensor:
    e = lattice.e.astype(float)
    w = lattice.w
    cs2 = lattice.cs2_float
    dot = e @ e.T  # dot[a, b] = e_a . e_b
    ei_ej = dot[:, :, None]
    ei_ek = dot[:, None, :]
    ej_ek = dot[None, :, :]
    half = np.where(np.eye(lattice.n_e, dtype=bool), 0.5, 1.0)[None, :, :]
    bracket = 2.0 + (ei_ej + ei_ek - ej_ek) / cs2 + ei_ej * ei_ek / cs2**2
    return AlphaTensor(values=w[:, None, None] * half * bracket, lattice=lattice)


def beta(alpha_t: AlphaTensor, tau: float) -> BetaTensor:
    tau = check_tau(tau)
    n_e = alpha_t.lattice.n_e
    omega = DT / tau
    values = gamma(n_e) * (1.0 - omega) + chi(n_e)[None] * omega * alpha_t.values
    return BetaTensor(values=values, tau=tau, lattice=alpha_t.lattice)


def beta_for(lattice: LatticeModel, tau: float) -> BetaTensor:
    return beta(alpha(lattice), tau)


def dump_csv(tensor, path) -> None:
    """Write a tensor as ``i,j,k,value`` rows (debug diffing)."""
    values = tensor.values
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "k", "value"])
        for (i, j, k), v in np.ndenumerate(values):
            writer.writerow([i, j, k, repr(float(v))])
