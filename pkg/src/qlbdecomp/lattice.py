"""DmQn lattice descriptors.

Direction 0 is the rest velocity. Moving directions follow the order
axis-positive, axis-negative, then diagonals (D2Q9). Operator layouts in
:mod:`qlbdecomp.operators` depend on this order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

LATTICE_NAMES = ("D1Q3", "D2Q9")


@dataclass(frozen=True)
class LatticeModel:
    name: str
    dims: int
    velocities: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]
    cs2: Fraction
    reflect: tuple[int, ...]

    @property
    def n_e(self) -> int:
        return len(self.velocities)

    @property
    def e(self) -> np.ndarray:
        """Integer velocity array of shape (n_e, dims)."""
        return np.array(self.velocities, dtype=np.int64).reshape(self.n_e, self.dims)

    @property
    def e2d(self) -> np.ndarray:
        """Velocities padded to two components, shape (n_e, 2)."""
        out = np.zeros((self.n_e, 2), dtype=np.int64)
        out[:, : self.dims] = self.e
        return out

    @property
    def w(self) -> np.ndarray:
        return np.array([float(x) for x in self.weights])

    @property
    def cs2_float(self) -> float:
        return float(self.cs2)


def _reflection(velocities):
    index = {v: i for i, v in enumerate(velocities)}
    return tuple(index[tuple(-c for c in v)] for v in velocities)


def make_lattice(name: str) -> LatticeModel:
    """Return the standard lattice descriptor for ``name`` (c_s^2 = 1/3)."""
    key = str(name).upper()
    if key == "D1Q3":
        velocities = ((0,), (1,), (-1,))
        weights = (Fraction(2, 3), Fraction(1, 6), Fraction(1, 6))
        dims = 1
    elif key == "D2Q9":
        velocities = (
            (0, 0),
            (1, 0), (0, 1), (-1, 0), (0, -1),
            (1, 1), (-1, 1), (-1, -1), (1, -1),
        )
        weights = (Fraction(4, 9),) + (Fraction(1, 9),) * 4 + (Fraction(1, 36),) * 4
        dims = 2
    else:
        raise ValueError(f"unknown lattice {name!r}; expected one of {LATTICE_NAMES}")
    return LatticeModel(
        name=key,
        dims=dims,
        velocities=velocities,
        weights=weights,
        cs2=Fraction(1, 3),
        reflect=_reflection(velocities),
    )
