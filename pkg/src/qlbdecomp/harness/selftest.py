"""Quick invariant checks behind ``qlbdecomp selftest``."""

from __future__ import annotations

import numpy as np

from .. import classical, engine, operators
from ..classical import Grid, PdfField
from ..coefficients import beta_for
from ..lattice import make_lattice


def near_unity_field(lattice, grid, rng, amplitude=0.05) -> PdfField:
    base = np.repeat(lattice.w, grid.n_g)
    return PdfField(grid, lattice, base * (1.0 + amplitude * rng.uniform(-1, 1, base.size)))


def _max_rel(a, b) -> float:
    return float(np.max(np.abs(a - b) / np.abs(b)))


def check_quadratic_identity(rng) -> tuple[bool, str]:
    worst = 0.0
    for name in ("D1Q3", "D2Q9"):
        lat = make_lattice(name)
        grid = Grid(8, 1 if lat.dims == 1 else 8)
        beta = beta_for(lat, 0.7)
        f = near_unity_field(lat, grid, rng, 0.5)
        worst = max(worst, _max_rel(classical.collide_quadratic(f, beta, "exact").data,
                                    classical.collide_bgk(f, 0.7).data))
    return worst <= 1e-12, f"quadratic(exact 1/rho) vs BGK max rel {worst:.2e}"


def check_operator_product(rng) -> tuple[bool, str]:
    worst = 0.0
    for name, shape in (("D1Q3", (6, 1)), ("D2Q9", (4, 4))):
        lat = make_lattice(name)
        for bc in (classical.PERIODIC, classical.BOUNCE_BACK):
            grid = Grid(*shape, (bc, bc))
            f = near_unity_field(lat, grid, rng)
            oracle = classical.step(f, 0.6, "quadratic_linear")
            for variant in operators.VARIANTS:
                got, _ = engine.Emulator(lat, grid, 0.6, variant).step(f)
                worst = max(worst, _max_rel(got.data, oracle.data))
    return worst <= 1e-12, f"emulated step vs classical (2-rho) step max rel {worst:.2e}"


def check_permutation() -> tuple[bool, str]:
    ok = True
    for name, shape in (("D1Q3", (5, 1)), ("D2Q9", (4, 3))):
        lat = make_lattice(name)
        for bc in (classical.PERIODIC, classical.BOUNCE_BACK):
            s = operators.stream_matrix(lat, Grid(*shape, (bc, bc)))
            ok &= (s @ s.T != operators.sp.identity(s.shape[0])).nnz == 0
    return ok, "streaming matrix is a permutation (S S^T = I)"


def run_selftest(seed: int = 0) -> list[tuple[bool, str]]:
    rng = np.random.default_rng(seed)
    return [check_quadratic_identity(rng), check_operator_product(rng), check_permutation()]
