"""Qubit and CNOT estimates: operator decomposition vs. Carleman truncation.

Qubit counts are given both as integers (ceil of log2) and as the raw real
expression. CNOT counts are returned as log10 values so that grids up to
1e20 points stay representable; big-O constants are taken as 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeModel, make_lattice

LN2 = math.log(2.0)


def ceil_log2(n: int) -> int:
    """Exact ``ceil(log2(n))`` for a positive integer."""
    n = int(n)
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    return (n - 1).bit_length()


def qubits_present(n_f: int) -> int:
    """``2 + ceil(log2 n_f)``: computational register plus two ancillas."""
    return 2 + ceil_log2(n_f)


def qubits_present_padded(n_f: int) -> int:
    """Register size actually emulated, which also stores the auxiliary slot."""
    return 2 + ceil_log2(int(n_f) + 1)


def qubits_present_real(n_f: float) -> float:
    return 2.0 + math.log2(n_f)


def carleman_log2_size(n_f: float, k: int) -> float:
    """``log2(n_f + n_f^2 + ... + n_f^k)`` evaluated without forming the powers."""
    if k < 1:
        raise ValueError("truncation order must be >= 1")
    lg = math.log2(n_f)
    # n_f^k * sum_{j=0}^{k-1} n_f^{-j}
    tail = sum(2.0 ** (-j * lg) for j in range(k))
    return k * lg + math.log2(tail)


def qubits_carleman(n_f: int, k: int) -> int:
    """``1 + ceil(log2(sum_{j=1..k} n_f^j))``, exact for integer ``n_f``."""
    if k < 1:
        raise ValueError("truncation order must be >= 1")
    n_f = int(n_f)
    return 1 + ceil_log2(sum(n_f**j for j in range(1, k + 1)))


def qubits_carleman_logspace(n_f: float, k: int) -> int:
    return 1 + math.ceil(carleman_log2_size(n_f, k) - 1e-12)


def qubits_carleman_real(n_f: float, k: int) -> float:
    return 1.0 + carleman_log2_size(n_f, k)


def _ln_operator_cost(n_q: float) -> float:
    """ln(2^(n_q-1) * (2^n_q - 1))."""
    return (n_q - 1) * LN2 + n_q * LN2 + math.log1p(-(2.0 ** -n_q))


def operators_per_step(n_e: int) -> int:
    return 2 * n_e + 3


def cnot_per_step(n_q: float, n_e: int) -> float:
    """log10 of ``(2 n_e + 3) 2^(n_q-1) (2^n_q - 1) + 2^n_q`` (operators + state preparation)."""
    if n_q < 1:
        raise ValueError("n_q must be >= 1")
    ln_ops = math.log(operators_per_step(n_e)) + _ln_operator_cost(n_q)
    return float(np.logaddexp(ln_ops, n_q * LN2)) / math.log(10.0)


def cnot_carleman(n_q: float) -> float:
    """log10 of one Carleman operator on ``n_q`` qubits plus state preparation."""
    if n_q < 1:
        raise ValueError("n_q must be >= 1")
    return float(np.logaddexp(_ln_operator_cost(n_q), n_q * LN2)) / math.log(10.0)


@dataclass
class ResourceReport:
    lattice: str
    rows: list[dict] = field(default_factory=list)

    COLUMNS = ("n_g", "n_f", "qubits_present_real", "qubits_present_int", "qubits_cl2",
               "qubits_cl3", "log10_cnot_present", "log10_cnot_cl2")

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS)
            for r in self.rows:
                writer.writerow([_fmt(r[c]) for c in self.COLUMNS])


def _fmt(v):
    return str(v) if isinstance(v, int) else f"{v:.17g}"


def resource_row(lattice: LatticeModel, n_g: int) -> dict:
    n_g = int(n_g)
    n_f = lattice.n_e * n_g
    q_int = qubits_present(n_f)
    q_cl2 = qubits_carleman(n_f, 2)
    return {
        "n_g": n_g,
        "n_f": n_f,
        "qubits_present_real": qubits_present_real(n_f),
        "qubits_present_int": q_int,
        "qubits_cl2": q_cl2,
        "qubits_cl3": qubits_carleman(n_f, 3),
        "log10_cnot_present": cnot_per_step(q_int, lattice.n_e),
        "log10_cnot_cl2": cnot_carleman(q_cl2),
    }


def sweep(lattice: LatticeModel | str = "D2Q9", grid_sizes=None, *, grid_min: float = 1e1,
          grid_max: float = 1e20, points: int = 39) -> ResourceReport:
    if isinstance(lattice, str):
        lattice = make_lattice(lattice)
    if grid_sizes is None:
        grid_sizes = np.geomspace(grid_min, grid_max, points)
    sizes = sorted({int(round(float(g))) for g in grid_sizes})
    if sizes and (sizes[0] < 1):
        raise ValueError("grid sizes must be positive")
    return ResourceReport(lattice.name, [resource_row(lattice, n) for n in sizes])
