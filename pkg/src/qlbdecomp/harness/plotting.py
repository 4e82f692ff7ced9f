"""Figure rendering from the emitted CSV files.

This module only depends on csv, numpy and matplotlib so that its source can
be copied verbatim into a standalone plotting script.
"""

import csv
import os

import numpy as np


def read_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_case1(csv_path, png_path):
    plt = _pyplot()
    d = read_columns(csv_path)
    fig, (ax_p, ax_u) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_p.plot(d["x"], d["p_star_exact"], "k-", lw=1, label="exact Riemann")
    ax_p.plot(d["x"], d["p_star_sim"], "r.", ms=2, label="simulation")
    ax_p.set_xlabel("x")
    ax_p.set_ylabel("normalized pressure")
    ax_p.legend(frameon=False)
    ax_u.plot(d["x"], d["u_exact"], "k-", lw=1)
    ax_u.plot(d["x"], d["u_sim"], "r.", ms=2)
    ax_u.set_xlabel("x")
    ax_u.set_ylabel("u")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return png_path


def plot_case2(csv_path, png_path, closure_level=1e-2):
    plt = _pyplot()
    d = read_columns(csv_path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(d["nu"], d["mean_rmse"], "o-", label="decomposition (2 - rho)")
    ax.axhline(closure_level, color="gray", ls="--", lw=1, label="Carleman closure level")
    ax.axhline(1e-5, color="gray", ls=":", lw=1)
    ax.set_xlabel("viscosity")
    ax.set_ylabel("mean RMSE")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return png_path


def plot_resources(csv_path, png_path):
    plt = _pyplot()
    d = read_columns(csv_path)
    fig, (ax_q, ax_c) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_q.semilogx(d["n_g"], d["qubits_present_int"], "o-", ms=3, label="present")
    ax_q.semilogx(d["n_g"], d["qubits_cl2"], "s-", ms=3, label="CL2")
    ax_q.semilogx(d["n_g"], d["qubits_cl3"], "^-", ms=3, label="CL3")
    ax_q.set_xlabel("grid points")
    ax_q.set_ylabel("qubits")
    ax_q.legend(frameon=False)
    ax_c.semilogx(d["n_g"], d["log10_cnot_present"], "o-", ms=3, label="present")
    ax_c.semilogx(d["n_g"], d["log10_cnot_cl2"], "s-", ms=3, label="CL2")
    ax_c.set_xlabel("grid points")
    ax_c.set_ylabel("log10 CNOT per step")
    ax_c.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return png_path


PLOTTERS = {
    "case1_discontinuity.csv": plot_case1,
    "case2_rmse.csv": plot_case2,
    "resources.csv": plot_resources,
}


def render_all(directory, names=None):
    """Render one PNG next to each known CSV in ``directory``."""
    out = []
    for name in names or sorted(PLOTTERS):
        path = os.path.join(directory, name)
        if names is None and not os.path.exists(path):
            continue
        if not os.path.exists(path):
            raise FileNotFoundError(path)
        out.append(PLOTTERS[name](path, path[:-4] + ".png"))
    return out
