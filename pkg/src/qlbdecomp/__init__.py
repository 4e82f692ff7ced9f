"""Lattice Boltzmann collision as a product of sparse operators on an emulated statevector."""

from .classical import Grid, PdfField
from .coefficients import alpha, beta, beta_for, tau_from_viscosity
from .engine import Emulator, decode, encode
from .lattice import LatticeModel, make_lattice
from .operators import build_plan

__version__ = "0.1.0"

__all__ = [
    "Emulator", "Grid", "LatticeModel", "PdfField", "alpha", "beta", "beta_for", "build_plan",
    "decode", "encode", "make_lattice", "tau_from_viscosity",
]
