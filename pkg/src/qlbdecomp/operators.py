"""Sparse operators of the decomposed collision and streaming step.

The augmented vector ``df = (f_0, ..., f_{n_e-1}, 1)`` has length
``n_b = n_f + 1`` and the emulated register holds four copies of it. Each
"tilde" operator acts on one ``df`` block; each "hat" operator acts on the
four-block state. Direction indices are 0-based (direction 0 here is the
first direction of the product, the rest velocity).

One time step applies, right to left::

    S_hat F_{n-1} B_{n-1} ... F_1 B_1 F_0 B_0 D_hat W_hat

After ``D_hat W_hat`` every block holds ``g = (2 - rho) f`` (plus the
auxiliary 1). ``layout_a`` accumulates the result in block 0 with block 1 as
scratch and reads ``g`` from block 2. ``layout_b`` keeps ``g`` in block 1,
uses block 2 as scratch and restores block 1 from block 3.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .classical import BOUNCE_BACK, Grid
from .coefficients import BetaTensor
from .lattice import LatticeModel

N_BLOCKS = 4
VARIANTS = ("layout_a", "layout_b")
DENSE_LIMIT = 4096

# Block patterns of the hatted operators. "X" is the tilde operator, "I" the
# identity, None a zero block. Rows are output blocks, columns input blocks.
_DIAG_ALL = [["X", None, None, None], [None, "X", None, None],
             [None, None, "X", None], [None, None, None, "X"]]
_FIRST = [["X", None, None, None], [None, "I", None, None],
          [None, None, "I", None], [None, None, None, "I"]]
PATTERNS = {
    "layout_a": {
        "B": [["I", None, None, None], [None, None, "X", None],
              [None, None, "I", None], [None, None, None, "I"]],
        "F": [["I", "X", None, None], [None, None, "I", None],
              [None, None, "I", None], [None, None, None, "I"]],
    },
    "layout_b": {
        "B": [["I", None, None, None], [None, None, "I", None],
              [None, "X", None, None], [None, None, None, "I"]],
        "F": [["I", None, "X", None], [None, None, None, "I"],
              [None, None, "I", None], [None, None, None, "I"]],
    },
}


@dataclass(frozen=True)
class SparseOperator:
    label: str
    matrix: sp.csr_matrix = field(repr=False)
    block_size: int
    occupancy: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1]

    def triples(self):
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def block_occupancy(self) -> np.ndarray:
        """4x4 map of which blocks hold stored entries."""
        coo = self.matrix.tocoo()
        occ = np.zeros((N_BLOCKS, N_BLOCKS), dtype=bool)
        occ[coo.row // self.block_size, coo.col // self.block_size] = True
        return occ

    def __matmul__(self, other):
        return self.matrix @ other


@dataclass(frozen=True)
class OperatorPlan:
    operators: tuple[SparseOperator, ...]
    variant: str

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    @property
    def collision(self) -> tuple[SparseOperator, ...]:
        return self.operators[:-1]

    @property
    def labels(self) -> list[str]:
        return [op.label for op in self.operators]


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return variant


def _check_direction(i: int, n_e: int) -> int:
    if not 0 <= i < n_e:
        raise IndexError(f"direction {i} out of range [0, {n_e})")
    return int(i)


def _csr(rows, cols, vals, n) -> sp.csr_matrix:
    m = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    m.sort_indices()
    return m


def _block_tilde(coeff: np.ndarray, n_g: int, aux_column: float, corner: float) -> sp.csr_matrix:
    """Tilde operator whose (r, c) direction block is ``coeff[r, c] * I``."""
    n_e = coeff.shape[0]
    n_f = n_e * n_g
    sites = np.arange(n_g)
    r, c = np.nonzero(coeff)
    rows = [(r[:, None] * n_g + sites).ravel()]
    cols = [(c[:, None] * n_g + sites).ravel()]
    vals = [np.repeat(coeff[r, c], n_g)]
    if aux_column != 0:
        rows.append(np.arange(n_f))
        cols.append(np.full(n_f, n_f))
        vals.append(np.full(n_f, float(aux_column)))
    rows.append([n_f])
    cols.append([n_f])
    vals.append([float(corner)])
    return _csr(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), n_f + 1)


def _hat(tilde: sp.spmatrix, pattern, label: str) -> SparseOperator:
    n_b = tilde.shape[0]
    eye = sp.identity(n_b, format="csr")
    zero = sp.csr_matrix((n_b, n_b))
    # explicit zero blocks keep bmat from dropping all-empty block columns
    pick = {None: zero, "X": tilde, "I": eye}
    blocks = [[pick[p] for p in row] for row in pattern]
    occupancy = np.array([[p is not None for p in row] for row in pattern])
    m = sp.bmat(blocks, format="csr")
    m.sort_indices()
    return SparseOperator(label, m, n_b, occupancy)


def augmented(f_data: np.ndarray) -> np.ndarray:
    """``df``: populations followed by the auxiliary constant 1."""
    return np.append(np.asarray(f_data, dtype=float).reshape(-1), 1.0)


def w_tilde(lattice: LatticeModel, grid: Grid) -> sp.csr_matrix:
    n_e = lattice.n_e
    return _block_tilde(-np.ones((n_e, n_e)), grid.n_g, 2.0, 1.0)


def build_W_hat(lattice: LatticeModel, grid: Grid) -> SparseOperator:
    return _hat(w_tilde(lattice, grid), _DIAG_ALL, "W_hat")


def d_tilde(df: np.ndarray) -> sp.csr_matrix:
    return sp.diags(np.asarray(df, dtype=float), format="csr")


def build_D_hat(df: np.ndarray, lattice: LatticeModel | None = None, grid: Grid | None = None) -> SparseOperator:
    df = np.asarray(df, dtype=float).reshape(-1)
    if lattice is not None and grid is not None and df.size != lattice.n_e * grid.n_g + 1:
        raise ValueError(f"df has length {df.size}, expected {lattice.n_e * grid.n_g + 1}")
    return _hat(d_tilde(df), _DIAG_ALL, "D_hat")


def b_tilde(i: int, beta: BetaTensor, grid: Grid) -> sp.csr_matrix:
    n_e = beta.lattice.n_e
    i = _check_direction(i, n_e)
    coeff = beta.values[:, i, :].copy()  # coeff[r, c] = beta_{r i c}
    coeff[:, :i] = 0.0  # chi_ic
    return _block_tilde(coeff, grid.n_g, 0.0, 1.0)


def build_B_hat(i: int, beta: BetaTensor, grid: Grid, variant: str = "layout_a") -> SparseOperator:
    _check_variant(variant)
    tilde = b_tilde(i, beta, grid)
    pattern = _FIRST if i == 0 else PATTERNS[variant]["B"]
    return _hat(tilde, pattern, f"B_hat_{i}")


def f_tilde(i: int, df: np.ndarray, lattice: LatticeModel, grid: Grid) -> sp.csr_matrix:
    n_e, n_g = lattice.n_e, grid.n_g
    i = _check_direction(i, n_e)
    df = np.asarray(df, dtype=float).reshape(-1)
    f_i = df[i * n_g:(i + 1) * n_g]
    return sp.diags(np.append(np.tile(f_i, n_e), 1.0 if i == 0 else 0.0), format="csr")


def build_F_hat(i: int, df: np.ndarray, lattice: LatticeModel, grid: Grid, variant: str = "layout_a") -> SparseOperator:
    _check_variant(variant)
    tilde = f_tilde(i, df, lattice, grid)
    pattern = _FIRST if i == 0 else PATTERNS[variant]["F"]
    return _hat(tilde, pattern, f"F_hat_{i}")


def stream_sources(lattice: LatticeModel, grid: Grid) -> np.ndarray:
    """Column index of the single 1 in each row of the streaming matrix.

    Row ``x + y*nx + i*nx*ny`` pulls from ``x - e_i``; when that point lies
    behind a bounce-back wall it pulls the reflected direction at the same
    site instead.
    """
    nx, ny, n_g = grid.nx, grid.ny, grid.n_g
    y, x = np.divmod(np.arange(n_g), nx)
    cols = np.empty(lattice.n_e * n_g, dtype=np.int64)
    for i, (ex, ey) in enumerate(lattice.e2d):
        sx, sy = x - ex, y - ey
        outside = np.zeros(n_g, dtype=bool)
        if grid.boundary[0] == BOUNCE_BACK:
            outside |= (sx < 0) | (sx >= nx)
        if grid.boundary[1] == BOUNCE_BACK:
            outside |= (sy < 0) | (sy >= ny)
        src = (sx % nx) + (sy % ny) * nx + i * n_g
        wall = x + y * nx + lattice.reflect[i] * n_g
        cols[i * n_g:(i + 1) * n_g] = np.where(outside, wall, src)
    return cols


def stream_matrix(lattice: LatticeModel, grid: Grid) -> sp.csr_matrix:
    cols = stream_sources(lattice, grid)
    n_f = cols.size
    return _csr(np.arange(n_f), cols, np.ones(n_f), n_f)


def build_stream_matrix(lattice: LatticeModel, grid: Grid) -> SparseOperator:
    s = stream_matrix(lattice, grid)
    s_tilde = sp.block_diag([s, sp.identity(1)], format="csr")
    return _hat(s_tilde, _FIRST, "S_hat")


def build_plan(lattice: LatticeModel, grid: Grid, beta: BetaTensor, df: np.ndarray,
               variant: str = "layout_a", stream_op: SparseOperator | None = None,
               w_op: SparseOperator | None = None) -> OperatorPlan:
    """Operators of one time step in application order.

    ``stream_op`` and ``w_op`` do not depend on the populations and may be
    passed in prebuilt; everything else is rebuilt from ``df``.
    """
    _check_variant(variant)
    ops = [w_op or build_W_hat(lattice, grid), build_D_hat(df, lattice, grid)]
    for i in range(lattice.n_e):
        ops.append(build_B_hat(i, beta, grid, variant))
        ops.append(build_F_hat(i, df, lattice, grid, variant))
    ops.append(stream_op or build_stream_matrix(lattice, grid))
    return OperatorPlan(tuple(ops), variant)


def to_dense(op: SparseOperator) -> np.ndarray:
    if op.block_size > DENSE_LIMIT:
        raise MemoryError(f"refusing dense conversion of block size {op.block_size} > {DENSE_LIMIT}")
    return op.matrix.toarray()


def dump_operator(op: SparseOperator, path, variant: str = "") -> None:
    rows, cols, vals = op.triples()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "n_rows", "n_cols", "variant"])
        writer.writerow([op.label, op.n_rows, op.n_cols, variant])
        writer.writerow(["row", "col", "value"])
        for r, c, v in zip(rows, cols, vals):
            writer.writerow([int(r), int(c), f"{v:.17g}"])
