"""Reference BGK lattice Boltzmann solver.

Populations are stored direction-major: flat index ``x + y*nx + i*nx*ny``.
Besides the plain BGK collision, the collision can be evaluated through the
quadratic ``beta`` form with either the exact ``1/rho`` or the weakly
compressible ``2 - rho`` approximation; the statevector engine is checked
against the latter.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .coefficients import DT, BetaTensor, beta_for, check_tau, chi
from .lattice import LatticeModel

logger = logging.getLogger(__name__)

PERIODIC = "periodic"
BOUNCE_BACK = "bounce_back"
BOUNDARIES = (PERIODIC, BOUNCE_BACK)

MODES = ("bgk", "quadratic_exact", "quadratic_linear")


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int = 1
    boundary: tuple[str, str] = (PERIODIC, PERIODIC)

    def __post_init__(self):
        if self.nx <= 0 or self.ny <= 0:
            raise ValueError(f"grid dimensions must be positive, got {self.nx}x{self.ny}")
        if len(self.boundary) != 2 or any(b not in BOUNDARIES for b in self.boundary):
            raise ValueError(f"boundary must be a pair drawn from {BOUNDARIES}, got {self.boundary}")

    @property
    def n_g(self) -> int:
        return self.nx * self.ny


@dataclass
class PdfField:
    grid: Grid
    lattice: LatticeModel
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1)
        if self.data.size != self.n_f:
            raise ValueError(f"expected {self.n_f} populations, got {self.data.size}")

    @property
    def n_f(self) -> int:
        return self.lattice.n_e * self.grid.n_g

    @property
    def per_direction(self) -> np.ndarray:
        """View of shape (n_e, n_g)."""
        return self.data.reshape(self.lattice.n_e, self.grid.n_g)

    @property
    def cube(self) -> np.ndarray:
        """View of shape (n_e, ny, nx)."""
        return self.data.reshape(self.lattice.n_e, self.grid.ny, self.grid.nx)

    def with_data(self, data) -> "PdfField":
        return PdfField(self.grid, self.lattice, data)

    def copy(self) -> "PdfField":
        return self.with_data(self.data.copy())


@dataclass
class Macros:
    rho: np.ndarray  # (n_g,)
    momentum: np.ndarray  # (dims, n_g)

    @property
    def velocity(self) -> np.ndarray:
        return self.momentum / self.rho


def _warn_nonpositive(data: np.ndarray, where: str) -> None:
    bad = np.count_nonzero(data <= 0)
    if bad:
        logger.warning("%d nonpositive populations after %s", bad, where)


def moments(f: PdfField) -> Macros:
    fd = f.per_direction
    e = f.lattice.e.astype(float)
    return Macros(rho=fd.sum(axis=0), momentum=e.T @ fd)


def equilibrium(macros: Macros, lattice: LatticeModel) -> np.ndarray:
    """Second-order equilibrium, returned with shape (n_e, n_g)."""
    rho = np.asarray(macros.rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("equilibrium requires positive density")
    u = np.asarray(macros.momentum, dtype=float).reshape(lattice.dims, -1) / rho
    cs2 = lattice.cs2_float
    eu = lattice.e.astype(float) @ u
    uu = (u * u).sum(axis=0)
    return lattice.w[:, None] * rho * (1.0 + eu / cs2 + eu**2 / (2 * cs2**2) - uu / (2 * cs2))


def equilibrium_field(macros: Macros, lattice: LatticeModel, grid: Grid) -> PdfField:
    return PdfField(grid, lattice, equilibrium(macros, lattice))


def collide_bgk(f: PdfField, tau: float) -> PdfField:
    omega = DT / check_tau(tau)
    fd = f.per_direction
    feq = equilibrium(moments(f), f.lattice)
    return f.with_data(fd - omega * (fd - feq))


def quadratic_form(fd: np.ndarray, beta: BetaTensor) -> np.ndarray:
    """``sum_{j<=k} beta_ijk f_j f_k`` per site, shape (n_e, n_g)."""
    upper = beta.values * chi(fd.shape[0])[None]
    return np.einsum("ijk,jn,kn->in", upper, fd, fd)


def collide_quadratic(f: PdfField, beta: BetaTensor, inverse_rho_mode: str = "exact") -> PdfField:
    fd = f.per_direction
    rho = fd.sum(axis=0)
    if inverse_rho_mode == "exact":
        if np.any(rho <= 0):
            raise ValueError("exact 1/rho requires positive density")
        inv = 1.0 / rho
    elif inverse_rho_mode == "linear_2_minus_rho":
        inv = 2.0 - rho
    else:
        raise ValueError(f"unknown inverse_rho_mode {inverse_rho_mode!r}")
    out = inv * quadratic_form(fd, beta)
    _warn_nonpositive(out, "quadratic collision")
    return f.with_data(out)


def stream(f: PdfField) -> PdfField:
    """Pull streaming with halfway bounce-back on wall axes."""
    lat, grid = f.lattice, f.grid
    fs = f.cube
    out = np.empty_like(fs)
    for i, (ex, ey) in enumerate(lat.e2d):
        out[i] = np.roll(fs[i], shift=(ey, ex), axis=(0, 1))
    for i, (ex, ey) in enumerate(lat.e2d):
        opp = fs[lat.reflect[i]]
        # populations whose pull source lies behind a wall come back reflected
        if grid.boundary[0] == BOUNCE_BACK and ex != 0:
            col = 0 if ex > 0 else grid.nx - 1
            out[i][:, col] = opp[:, col]
        if grid.boundary[1] == BOUNCE_BACK and ey != 0:
            row = 0 if ey > 0 else grid.ny - 1
            out[i][row, :] = opp[row, :]
    return f.with_data(out)


def collide(f: PdfField, tau: float, mode: str, beta: BetaTensor | None = None) -> PdfField:
    if mode == "bgk":
        return collide_bgk(f, tau)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if beta is None:
        beta = beta_for(f.lattice, tau)
    kind = "exact" if mode == "quadratic_exact" else "linear_2_minus_rho"
    return collide_quadratic(f, beta, kind)


def step(f: PdfField, tau: float, mode: str = "bgk", beta: BetaTensor | None = None) -> PdfField:
    return stream(collide(f, tau, mode, beta))


def run(f0: PdfField, tau: float, steps: int, mode: str = "bgk") -> PdfField:
    beta = None if mode == "bgk" else beta_for(f0.lattice, tau)
    f = f0
    for _ in range(steps):
        f = step(f, tau, mode, beta)
    return f


def export_snapshot(f: PdfField, path, step_index: int = 0) -> None:
    """Write ``x,y,direction,f`` rows plus a JSON sidecar ``<path>.json``."""
    cube = f.cube
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "direction", "f"])
        for i in range(cube.shape[0]):
            for y in range(cube.shape[1]):
                for x in range(cube.shape[2]):
                    writer.writerow([x, y, i, f"{cube[i, y, x]:.17g}"])
    meta = {"lattice": f.lattice.name, "nx": f.grid.nx, "ny": f.grid.ny, "step": step_index}
    with open(f"{path}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
