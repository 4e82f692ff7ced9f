"""The two verification cases, the RMSE metric and CSV emission."""

from __future__ import annotations

import csv
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import classical, engine
from ..classical import PdfField, moments
from ..coefficients import tau_from_viscosity
from ..riemann import RiemannSetup, solve
from .config import CaseConfig, ConfigError

logger = logging.getLogger(__name__)

RMSE_EPS = 1e-30
PLATEAU_FRACTION = 0.85
CASE1_CSV = "case1_discontinuity.csv"
CASE2_CSV = "case2_rmse.csv"
CASE2_DETAIL_CSV = "case2_rmse_directions.csv"
RESOURCES_CSV = "resources.csv"


def fmt(v) -> str:
    return f"{float(v):.17g}"


def write_csv_atomic(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)
    return path


# -- initial conditions ------------------------------------------------------

def init_discontinuity(cfg: CaseConfig) -> PdfField:
    """Resting fluid with ``rho = 1 + drho`` on cells ``x <= n_g/2`` (1-based)."""
    if cfg.lattice != "D1Q3" or cfg.ny != 1:
        raise ConfigError("discontinuity initialization needs D1Q3 on a 1D grid")
    lat, grid = cfg.lattice_model, cfg.grid
    x = np.arange(1, grid.nx + 1)
    rho = np.where(x <= grid.nx / 2, 1.0 + cfg.delta_rho, 1.0)
    macros = classical.Macros(rho=rho, momentum=np.zeros((1, grid.n_g)))
    return classical.equilibrium_field(macros, lat, grid)


def init_kolmogorov(cfg: CaseConfig) -> PdfField:
    if cfg.lattice != "D2Q9":
        raise ConfigError("Kolmogorov initialization needs D2Q9")
    lat, grid = cfg.lattice_model, cfg.grid
    y, x = np.divmod(np.arange(grid.n_g), grid.nx)
    e = lat.e.astype(float)
    shear_x = cfg.A_x * np.cos(2 * np.pi * cfg.k_x * y / grid.ny)
    shear_y = cfg.A_y * np.cos(2 * np.pi * cfg.k_y * x / grid.nx)
    data = lat.w[:, None] * (1.0 + shear_x * e[:, 0:1] + shear_y * e[:, 1:2])
    return PdfField(grid, lat, data)


# -- metric ----------------------------------------------------------------

@dataclass
class RmseResult:
    viscosity: float
    mean_rmse: float
    per_direction: np.ndarray
    mean_rmse_unsquared: float = float("nan")
    flagged: int = 0


def rmse(fp: PdfField, fe: PdfField, viscosity: float = float("nan")) -> RmseResult:
    """Mean over directions of the per-direction relative RMS error.

    Also reports the literal form without the square inside the sum; signed
    errors can make its radicand negative, in which case it is NaN.
    """
    a, b = fp.per_direction, fe.per_direction
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    small = np.abs(b) < RMSE_EPS
    denom = np.where(small, np.copysign(RMSE_EPS, np.where(b == 0, 1.0, b)), b)
    rel = (a - b) / denom
    per_dir = np.sqrt(np.mean(rel**2, axis=1))
    signed = np.mean(rel, axis=1)
    with np.errstate(invalid="ignore"):
        literal = np.where(signed >= 0, np.sqrt(np.abs(signed)), np.nan)
    return RmseResult(viscosity=float(viscosity), mean_rmse=float(per_dir.mean()),
                      per_direction=per_dir, mean_rmse_unsquared=float(np.mean(literal)),
                      flagged=int(small.sum()))


# -- simulation dispatch ------------------------------------------------------

def simulate(f0: PdfField, tau: float, steps: int, mode: str, variant: str = "layout_a") -> PdfField:
    if mode == "classical_bgk":
        return classical.run(f0, tau, steps, "bgk")
    if mode == "classical_quadratic":
        return classical.run(f0, tau, steps, "quadratic_linear")
    if mode == "quantum_emulated":
        return engine.run(f0, tau, steps, variant)[0]
    raise ConfigError(f"unknown mode {mode!r}")


# -- case 1 ----------------------------------------------------------------

@dataclass
class Case1Result:
    x: np.ndarray
    p_sim: np.ndarray
    u_sim: np.ndarray
    p_exact: np.ndarray
    u_exact: np.ndarray
    x0: float
    front_expected: tuple[float, float]
    front_sim: tuple[float, float]
    plateau_rel_p: float
    plateau_rel_u: float
    l2_rel_p: float
    l2_rel_u: float
    csv_path: Path | None = None

    @property
    def plateau_rel(self) -> float:
        return max(self.plateau_rel_p, self.plateau_rel_u)

    @property
    def front_offsets(self) -> tuple[float, float]:
        return tuple(abs(a - b) for a, b in zip(self.front_sim, self.front_expected))


def _crossing(x, values, level, lo, hi) -> float:
    """Linearly interpolated position where ``values`` first crosses ``level`` in [lo, hi)."""
    seg = values[lo:hi] - level
    idx = np.nonzero(np.sign(seg[:-1]) != np.sign(seg[1:]))[0]
    if idx.size == 0:
        return float("nan")
    j = idx[0]
    return float(x[lo + j] + seg[j] / (seg[j] - seg[j + 1]) * (x[lo + j + 1] - x[lo + j]))


def run_case1(cfg: CaseConfig, out_dir=None) -> Case1Result:
    lat = cfg.lattice_model
    f0 = init_discontinuity(cfg)
    tau = tau_from_viscosity(cfg.viscosity[0])
    f = simulate(f0, tau, cfg.steps, cfg.mode, cfg.variant)

    m = moments(f)
    x = np.arange(1, cfg.nx + 1, dtype=float)
    drho = cfg.delta_rho
    p_sim = (m.rho - 1.0) / drho
    u_sim = m.momentum[0] / m.rho

    cs = math.sqrt(lat.cs2_float)
    x0 = (cfg.nx // 2) + 0.5
    setup = RiemannSetup(1.0 + drho, 1.0, cs, float(cfg.steps), x0=x0)
    p_ex, u_ex = solve(setup, x)

    reach = cs * cfg.steps
    plateau = np.abs(x - x0) <= PLATEAU_FRACTION * reach
    plateau_p = float(np.max(np.abs(p_sim[plateau] - p_ex[plateau]) / np.abs(p_ex[plateau])))
    plateau_u = float(np.max(np.abs(u_sim[plateau] - u_ex[plateau]) / np.abs(u_ex[plateau])))
    l2_p = float(np.linalg.norm(p_sim - p_ex) / np.linalg.norm(p_ex))
    l2_u = float(np.linalg.norm(u_sim - u_ex) / max(np.linalg.norm(u_ex), RMSE_EPS))

    mid = cfg.nx // 2
    left = _crossing(x, p_sim, 0.75, 0, mid)
    right = _crossing(x, p_sim, 0.25, mid, cfg.nx)
    result = Case1Result(x, p_sim, u_sim, p_ex, u_ex, x0, (x0 - reach, x0 + reach), (left, right),
                         plateau_p, plateau_u, l2_p, l2_u)
    if out_dir is not None:
        rows = [[int(xi), fmt(a), fmt(b), fmt(c), fmt(d)]
                for xi, a, b, c, d in zip(x, p_sim, u_sim, p_ex, u_ex)]
        result.csv_path = write_csv_atomic(Path(out_dir) / CASE1_CSV,
                                           ["x", "p_star_sim", "u_sim", "p_star_exact", "u_exact"], rows)
    return result


# -- case 2 ----------------------------------------------------------------

def _case2_single(args) -> RmseResult:
    cfg, nu = args
    f0 = init_kolmogorov(cfg)
    tau = tau_from_viscosity(nu)
    reference = classical.run(f0, tau, cfg.steps, "bgk")
    candidate = simulate(f0, tau, cfg.steps, cfg.mode, cfg.variant)
    res = rmse(candidate, reference, nu)
    logger.info("nu=%.6g tau=%.6g mean RMSE=%.3e", nu, tau, res.mean_rmse)
    return res


def _write_case2_detail(out_dir: Path, res: RmseResult) -> Path:
    rows = [[fmt(res.viscosity), i, fmt(v)] for i, v in enumerate(res.per_direction)]
    return write_csv_atomic(out_dir / "case2_detail" / f"nu_{res.viscosity:.6g}.csv",
                            ["nu", "direction", "rmse"], rows)


def run_case2(cfg: CaseConfig, out_dir=None) -> list[RmseResult]:
    jobs = [(cfg, nu) for nu in cfg.viscosity]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_case2_single, jobs))
    else:
        results = [_case2_single(j) for j in jobs]
    if out_dir is not None:
        out_dir = Path(out_dir)
        for res in results:
            _write_case2_detail(out_dir, res)
        write_csv_atomic(out_dir / CASE2_CSV, ["nu", "mean_rmse", "mean_rmse_unsquared", "flagged"],
                         [[fmt(r.viscosity), fmt(r.mean_rmse), fmt(r.mean_rmse_unsquared), r.flagged]
                          for r in results])
        write_csv_atomic(out_dir / CASE2_DETAIL_CSV, ["nu", "direction", "rmse"],
                         [[fmt(r.viscosity), i, fmt(v)] for r in results
                          for i, v in enumerate(r.per_direction)])
    return results
