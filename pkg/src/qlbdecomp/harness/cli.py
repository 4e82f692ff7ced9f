"""Command line entry point.

Exit codes: 0 success, 1 numerical acceptance failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .. import resources
from . import plotting
from .cases import CASE1_CSV, CASE2_CSV, RESOURCES_CSV, run_case1, run_case2
from .config import CASES, RUN_MODES, CaseConfig, ConfigError, case_defaults, load_config, resolve_output_dir
from .report import emit_plot_script
from .selftest import run_selftest

EXIT_OK, EXIT_NUMERICAL, EXIT_INVALID = 0, 1, 2

CASE1_PLATEAU_TOL = 0.10
CASE1_FRONT_TOL = 3.0
CASE2_RMSE_TOL = 1e-5


def _finish(out: Path, csv_names, plots: bool) -> None:
    emit_plot_script(out, csv_names)
    if plots:
        for png in plotting.render_all(str(out), sorted(csv_names)):
            print(f"figure: {png}")


def _run_case(cfg: CaseConfig, out: Path, plots: bool) -> int:
    out.mkdir(parents=True, exist_ok=True)
    if cfg.case == "discontinuity_1d":
        res = run_case1(cfg, out)
        ok = res.plateau_rel <= CASE1_PLATEAU_TOL and max(res.front_offsets) <= CASE1_FRONT_TOL
        print(f"plateau rel diff p*={res.plateau_rel_p:.4f} u={res.plateau_rel_u:.4f}; "
              f"L2 rel p*={res.l2_rel_p:.4f} u={res.l2_rel_u:.4f}; "
              f"fronts {res.front_sim[0]:.2f}/{res.front_sim[1]:.2f} "
              f"(expected {res.front_expected[0]:.2f}/{res.front_expected[1]:.2f})")
        _finish(out, [CASE1_CSV], plots)
    elif cfg.case == "kolmogorov_2d":
        results = run_case2(cfg, out)
        for r in results:
            print(f"nu={r.viscosity:.6g} mean_rmse={r.mean_rmse:.3e}")
        ok = all(r.mean_rmse < CASE2_RMSE_TOL for r in results)
        _finish(out, [CASE2_CSV], plots)
    else:
        report = resources.sweep(cfg.lattice, grid_min=cfg.grid_min, grid_max=cfg.grid_max, points=cfg.points)
        report.to_csv(out / RESOURCES_CSV)
        ok = True
        _finish(out, [RESOURCES_CSV], plots)
    print(f"outputs written to {out}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_run(args) -> int:
    cfg = load_config(args.config) if args.config else case_defaults(args.case or "discontinuity_1d")
    if args.config and args.case and args.case != cfg.case:
        raise ConfigError(f"--case {args.case} conflicts with config case {cfg.case}")
    if args.mode:
        cfg.mode = args.mode
    if args.variant:
        cfg.variant = args.variant
    if args.workers:
        cfg.workers = args.workers
    cfg.validate()
    return _run_case(cfg, resolve_output_dir(cfg, args.out), not args.no_plots)


def cmd_resources(args) -> int:
    cfg = case_defaults("resources")
    cfg.lattice = args.lattice
    cfg.grid_min, cfg.grid_max, cfg.points = args.grid_min, args.grid_max, args.points
    cfg.validate()
    if not 1 <= cfg.grid_min <= cfg.grid_max or cfg.points < 1:
        raise ConfigError("need 1 <= grid-min <= grid-max and points >= 1")
    return _run_case(cfg, resolve_output_dir(cfg, args.out), not args.no_plots)


def cmd_selftest(args) -> int:
    results = run_selftest(args.seed)
    for ok, message in results:
        print(f"{'PASS' if ok else 'FAIL'}  {message}")
    return EXIT_OK if all(ok for ok, _ in results) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlbdecomp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a verification case")
    run.add_argument("--case", choices=CASES)
    run.add_argument("--config", help="key = value case file")
    run.add_argument("--mode", choices=RUN_MODES)
    run.add_argument("--variant", choices=("layout_a", "layout_b"))
    run.add_argument("--workers", type=int, help="parallel viscosity-sweep workers")
    run.add_argument("--out", help="output directory (overrides $QLBDECOMP_OUT)")
    run.add_argument("--no-plots", action="store_true", help="skip PNG rendering")
    run.set_defaults(func=cmd_run)

    res = sub.add_parser("resources", help="qubit/CNOT scaling table")
    res.add_argument("--lattice", default="D2Q9")
    res.add_argument("--grid-min", type=float, default=1e1)
    res.add_argument("--grid-max", type=float, default=1e20)
    res.add_argument("--points", type=int, default=39)
    res.add_argument("--out")
    res.add_argument("--no-plots", action="store_true")
    res.set_defaults(func=cmd_resources)

    st = sub.add_parser("selftest", help="run the invariant checks")
    st.add_argument("--seed", type=int, default=0)
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
