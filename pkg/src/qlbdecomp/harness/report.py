"""Standalone plotting script emission."""

from __future__ import annotations

import inspect
from pathlib import Path

from . import plotting

SCRIPT_NAME = "plot_figures.py"

_MAIN = '''

if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    for png in render_all(here, {names!r}):
        print(png)
'''


def emit_plot_script(out_dir, csv_names) -> Path:
    """Write ``plot_figures.py`` rendering one figure per CSV in ``csv_names``.

    The script embeds the plotting module source, so identical inputs give a
    byte-identical file.
    """
    out_dir = Path(out_dir)
    names = sorted({Path(n).name for n in csv_names})
    for name in names:
        if name not in plotting.PLOTTERS:
            raise ValueError(f"no plotter registered for {name}")
        if not (out_dir / name).exists():
            raise FileNotFoundError(f"cannot emit plot script: missing {out_dir / name}")
    source = inspect.getsource(plotting) + _MAIN.format(names=names)
    path = out_dir / SCRIPT_NAME
    path.write_text(source)
    return path
