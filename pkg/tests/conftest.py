import numpy as np
import pytest

from qlbdecomp.classical import Grid, PdfField
from qlbdecomp.lattice import make_lattice


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=["D1Q3", "D2Q9"])
def lattice(request):
    return make_lattice(request.param)


def random_field(lattice, grid, rng, amplitude=0.05):
    """Positive populations scattered around the rest weights."""
    base = np.repeat(lattice.w, grid.n_g)
    return PdfField(grid, lattice, base * (1.0 + amplitude * rng.uniform(-1, 1, base.size)))


def small_grid(lattice, n=4, boundary="periodic"):
    ny = 1 if lattice.dims == 1 else n
    return Grid(n, ny, (boundary, boundary))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
