"""Case configuration: flat ``key = value`` text files."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..classical import BOUNCE_BACK, PERIODIC, Grid
from ..lattice import LATTICE_NAMES, make_lattice
from ..operators import VARIANTS

CASES = ("discontinuity_1d", "kolmogorov_2d", "resources")
RUN_MODES = ("classical_bgk", "classical_quadratic", "quantum_emulated")
OUT_ENV = "QLBDECOMP_OUT"


class ConfigError(ValueError):
    """Invalid or incomplete configuration."""


def default_viscosities(n: int = 8) -> list[float]:
    return [float(v) for v in np.geomspace(0.0088, 1.0 / 6.0, n)]


@dataclass
class CaseConfig:
    case: str = "discontinuity_1d"
    lattice: str = "D1Q3"
    nx: int = 500
    ny: int = 1
    steps: int = 200
    delta_rho: float = 5e-5
    viscosity: list[float] = field(default_factory=lambda: [1.0 / 6.0])
    A_x: float = 0.3
    A_y: float = 0.2
    k_x: int = 1
    k_y: int = 4
    variant: str = "layout_a"
    mode: str = "quantum_emulated"
    output_dir: str = "out"
    seed: int = 0
    workers: int = 1
    grid_min: float = 1e1
    grid_max: float = 1e20
    points: int = 39

    def validate(self) -> "CaseConfig":
        if self.case not in CASES:
            raise ConfigError(f"case must be one of {CASES}, got {self.case!r}")
        if self.lattice.upper() not in LATTICE_NAMES:
            raise ConfigError(f"lattice must be one of {LATTICE_NAMES}, got {self.lattice!r}")
        self.lattice = self.lattice.upper()
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.mode not in RUN_MODES:
            raise ConfigError(f"mode must be one of {RUN_MODES}, got {self.mode!r}")
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if self.nx <= 0 or self.ny <= 0:
            raise ConfigError("nx and ny must be positive")
        if not self.viscosity or any(v <= 0 for v in self.viscosity):
            raise ConfigError("viscosity values must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.case == "discontinuity_1d" and (self.lattice != "D1Q3" or self.ny != 1):
            raise ConfigError("discontinuity_1d needs lattice D1Q3 and ny = 1")
        if self.case == "kolmogorov_2d" and self.lattice != "D2Q9":
            raise ConfigError("kolmogorov_2d needs lattice D2Q9")
        return self

    @property
    def lattice_model(self):
        return make_lattice(self.lattice)

    @property
    def grid(self) -> Grid:
        if self.case == "discontinuity_1d":
            return Grid(self.nx, 1, (BOUNCE_BACK, PERIODIC))
        return Grid(self.nx, self.ny, (PERIODIC, PERIODIC))


def case_defaults(case: str) -> CaseConfig:
    if case == "discontinuity_1d":
        return CaseConfig()
    if case == "kolmogorov_2d":
        return CaseConfig(case=case, lattice="D2Q9", nx=32, ny=32, steps=100,
                          viscosity=default_viscosities())
    if case == "resources":
        return CaseConfig(case=case, lattice="D2Q9", nx=1, ny=1, steps=0)
    raise ConfigError(f"case must be one of {CASES}, got {case!r}")


_FIELDS = {f.name: f for f in dataclasses.fields(CaseConfig)}


def _coerce(key: str, raw: str):
    default = getattr(CaseConfig(), key)
    try:
        if key == "viscosity":
            return [float(eval_fraction(v)) for v in raw.split(",") if v.strip()]
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(eval_fraction(raw))
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def eval_fraction(text: str) -> float:
    """Parse ``1/6`` style values as well as plain floats."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def parse_config(text: str, base: CaseConfig | None = None) -> CaseConfig:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        pairs[key] = value
    if base is None:
        base = case_defaults(pairs.get("case", "discontinuity_1d"))
    cfg = dataclasses.replace(base, **{k: _coerce(k, v) for k, v in pairs.items()})
    return cfg.validate()


def load_config(path) -> CaseConfig:
    return parse_config(Path(path).read_text())


def resolve_output_dir(cfg: CaseConfig, cli_out: str | None) -> Path:
    """``--out`` wins over the environment, which wins over the config."""
    out = cli_out or os.environ.get(OUT_ENV) or cfg.output_dir
    return Path(out)
