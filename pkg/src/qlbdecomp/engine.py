"""Classical emulation of the quantum register.

The statevector holds four zero-padded copies of ``df``; the two leading index
bits (the ancilla pair) select the copy. Operators are non-unitary, so they are
applied as plain linear maps and the state is renormalized afterwards, with the
norm folded into ``scale``. Read-out is idealized: amplitudes are read directly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .classical import Grid, PdfField
from .coefficients import BetaTensor, beta_for
from .lattice import LatticeModel
from .operators import N_BLOCKS, OperatorPlan, augmented, build_plan, build_stream_matrix, build_W_hat

AUX_TOL = 1e-9
RESULT_BLOCK = 0


class LayoutError(RuntimeError):
    """Raised when the decoded auxiliary slot is not 1 (block wiring bug)."""


@dataclass
class QlbState:
    amplitudes: np.ndarray = field(repr=False)
    scale: float
    n_q: int
    n_b: int
    grid: Grid
    lattice: LatticeModel

    @property
    def block_len(self) -> int:
        return 1 << self.n_q

    @property
    def pad(self) -> int:
        return self.block_len - self.n_b

    @property
    def n_qubits(self) -> int:
        return self.n_q + 2

    def blocks(self) -> np.ndarray:
        """Physical (scaled) payload of each block, shape (4, n_b)."""
        a = self.amplitudes.reshape(N_BLOCKS, self.block_len)
        return self.scale * a[:, : self.n_b]

    def padding(self) -> np.ndarray:
        return self.amplitudes.reshape(N_BLOCKS, self.block_len)[:, self.n_b:]


@dataclass
class StepRecord:
    step: int
    norm: float
    scale: float
    total_mass: float
    max_abs_rho_minus_1: float


def computational_qubits(n_b: int) -> int:
    return max(1, math.ceil(math.log2(n_b)))


def _payload_index(n_b: int, n_q: int) -> np.ndarray:
    return (np.arange(N_BLOCKS)[:, None] * (1 << n_q) + np.arange(n_b)).ravel()


def encode(f: PdfField) -> QlbState:
    df = augmented(f.data)
    n_b = df.size
    n_q = computational_qubits(n_b)
    phi = np.zeros(N_BLOCKS << n_q)
    phi[_payload_index(n_b, n_q)] = np.tile(df, N_BLOCKS)
    norm = float(np.linalg.norm(phi))
    return QlbState(phi / norm, norm, n_q, n_b, f.grid, f.lattice)


def apply(state: QlbState, plan, normalize: str = "operator") -> QlbState:
    """Apply ``plan`` (an OperatorPlan or any iterable of operators) in order.

    Operators act on the payload slots; padding slots are left untouched,
    which is the same as extending each operator by the identity there.
    ``normalize`` is ``"operator"`` (after every operator) or ``"step"``.
    """
    if normalize not in ("operator", "step"):
        raise ValueError(f"unknown normalization {normalize!r}")
    idx = _payload_index(state.n_b, state.n_q)
    v = state.amplitudes[idx]
    scale = state.scale
    for op in plan:
        if op.shape != (v.size, v.size):
            raise ValueError(f"operator {op.label} has shape {op.shape}, state payload is {v.size}")
        v = op.matrix @ v
        if normalize == "operator":
            norm = float(np.linalg.norm(v))
            if norm == 0.0 or not math.isfinite(norm):
                raise FloatingPointError(f"degenerate norm {norm} after {op.label}")
            v /= norm
            scale *= norm
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not math.isfinite(norm):
        raise FloatingPointError(f"degenerate norm {norm}")
    amps = np.zeros_like(state.amplitudes)
    amps[idx] = v / norm
    return QlbState(amps, scale * norm, state.n_q, state.n_b, state.grid, state.lattice)


def decode(state: QlbState, block: int = RESULT_BLOCK, check_aux: bool = True) -> PdfField:
    payload = state.blocks()[block]
    if check_aux and abs(payload[-1] - 1.0) > AUX_TOL:
        raise LayoutError(f"auxiliary slot of block {block} decodes to {payload[-1]!r}, expected 1")
    return PdfField(state.grid, state.lattice, payload[:-1].copy())


class Emulator:
    """Steps a field through encode, operator product, apply and decode."""

    def __init__(self, lattice: LatticeModel, grid: Grid, tau: float, variant: str = "layout_a",
                 beta: BetaTensor | None = None):
        self.lattice = lattice
        self.grid = grid
        self.tau = tau
        self.variant = variant
        self.beta = beta if beta is not None else beta_for(lattice, tau)
        # population-independent operators are built once
        self._w = build_W_hat(lattice, grid)
        self._s = build_stream_matrix(lattice, grid)

    def plan(self, f: PdfField) -> OperatorPlan:
        return build_plan(self.lattice, self.grid, self.beta, augmented(f.data), self.variant,
                          stream_op=self._s, w_op=self._w)

    def step(self, f: PdfField, normalize: str = "operator") -> tuple[PdfField, QlbState]:
        state = apply(encode(f), self.plan(f), normalize)
        return decode(state), state


def run(f0: PdfField, tau: float, steps: int, variant: str = "layout_a",
        normalize: str = "operator") -> tuple[PdfField, list[StepRecord]]:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    emu = Emulator(f0.lattice, f0.grid, tau, variant)
    f = f0
    trace = []
    for n in range(1, steps + 1):
        f, state = emu.step(f, normalize)
        rho = f.per_direction.sum(axis=0)
        trace.append(StepRecord(
            step=n,
            norm=float(np.linalg.norm(state.amplitudes)),
            scale=state.scale,
            total_mass=float(rho.sum()),
            max_abs_rho_minus_1=float(np.max(np.abs(rho - 1.0))),
        ))
    return f, trace


def export_trace(trace: list[StepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "norm", "scale", "total_mass", "max_abs_rho_minus_1"])
        for r in trace:
            writer.writerow([r.step, f"{r.norm:.17g}", f"{r.scale:.17g}",
                             f"{r.total_mass:.17g}", f"{r.max_abs_rho_minus_1:.17g}"])
