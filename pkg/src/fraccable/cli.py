"""Command-line entry point: ``fraccable {weights,spectral,solve,sweep}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .config import load_config
from .exceptions import ParameterError
from .fem import FemSpace
from .harness import check_report, default_workers, run_table, write_profile_csv
from .problems import make_problem
from .reference_tables import TABLE_IDS
from .solver import SchemeConfig, run
from .spectral import H_grid, fbn_admissible_grid, szego_epsilon0, toeplitz_min_eigen
from .weights import Family, ThetaScheme, scheme_weights

__all__ = ["main", "build_parser"]

logger = logging.getLogger("fraccable")


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            yield fh


def _scheme_args(p, alpha_required=True):
    p.add_argument("--family", choices=[f.value for f in Family], default="fbt")
    p.add_argument("--alpha", type=float, required=alpha_required)
    p.add_argument("--theta", type=float, default=0.0)


def cmd_weights(args) -> int:
    scheme = ThetaScheme(Family(args.family), args.alpha, args.theta)
    table = scheme_weights(scheme, args.n)
    with _output(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "omega_k"])
        for k, w in enumerate(table.omega):
            writer.writerow([k, repr(float(w))])
    return 0


def cmd_spectral(args) -> int:
    if args.contour:
        if args.method == "fbn":
            alphas, thetas = fbn_admissible_grid(args.n_alpha, args.n_theta)
        else:
            alphas = np.linspace(0.025, 1.0, args.n_alpha)
            thetas = np.tile(np.linspace(-1.0, 0.45, args.n_theta), (args.n_alpha, 1))
        values = H_grid(alphas, thetas, method=args.method)
        with _output(args.out) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["alpha", "theta", "H"])
            for i, a in enumerate(alphas):
                for th, h in zip(thetas[i], values[i]):
                    writer.writerow([f"{a:.6g}", f"{th:.6g}", f"{h:.10e}"])
        return 0

    if args.alpha is None:
        raise ParameterError("--alpha is required for --epsilon0 and --mineig")
    scheme = ThetaScheme(Family(args.family), args.alpha, args.theta)
    if args.epsilon0:
        print(f"{szego_epsilon0(scheme):.15g}")
        return 0
    table = scheme_weights(scheme, args.n)
    print(f"{toeplitz_min_eigen(table, args.n, shift_last=args.shift):.15g}")
    return 0


def _write_snapshot(path, space, coeffs):
    coords, values = space.full_nodal_values(coeffs)
    names = ["x", "y"][: len(coords)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names + ["value"])
        for row in zip(*coords, values):
            writer.writerow([f"{v:.10g}" for v in row])


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    problem = make_problem(cfg.case, cfg.gamma, cfg.kappa, cfg.mu)
    space = FemSpace(problem.mesh(cfg.n_cells))
    config = SchemeConfig.build(
        problem,
        cfg.family,
        cfg.theta_gamma,
        cfg.theta_kappa,
        cfg.n_steps,
        correction=cfg.correction,
        family_kappa=cfg.family_kappa,
    )
    result = run(problem, space, config)
    write_profile_csv(out / "errors.csv", result)
    for n in cfg.snapshots:
        _write_snapshot(out / f"snapshot_{n}.csv", space, result.U[n])
    summary = {
        "E": result.max_error,
        "timings": result.timings,
        "stats": result.stats,
        "metadata": result.metadata,
        "snapshots": list(cfg.snapshots),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    print(f"E = {result.max_error:.5e}  ({result.timings['total']:.2f} s)")
    return 0


def cmd_sweep(args) -> int:
    workers = args.workers if args.workers is not None else default_workers()
    report = run_table(args.table, paper_scale=args.paper_scale, workers=workers)
    report.write(args.out)
    sys.stdout.write(report.to_csv())
    status = 0
    if report.failed:
        for r in report.failed:
            print(f"FAILED RUN {r.entry.run_id}: {r.message}", file=sys.stderr)
        status = 1
    if args.check:
        results = check_report(report, args.table, paper_scale=args.paper_scale)
        for c in results:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
        if not all(c.passed for c in results):
            status = 1
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraccable", description="Fractional Cable equation solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="convolution quadrature weights as CSV")
    _scheme_args(p)
    p.add_argument("--n", type=int, required=True, help="largest index k")
    p.add_argument("--out")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("spectral", help="symbol and Toeplitz diagnostics")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--contour", action="store_true", help="H over an (alpha, theta) grid as CSV")
    mode.add_argument("--epsilon0", action="store_true", help="Szego limit of the determinant ratios")
    mode.add_argument("--mineig", action="store_true", help="smallest eigenvalue of the order-n matrix")
    _scheme_args(p, alpha_required=False)
    p.add_argument("--method", choices=[f.value for f in Family], default="fbn", help="family for --contour")
    p.add_argument("--n-alpha", type=int, default=41)
    p.add_argument("--n-theta", type=int, default=41)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--shift", type=float, default=0.25, help="subtracted from the last diagonal entry")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("solve", help="one solver run from a TOML/JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="reproduce a convergence table")
    p.add_argument("--table", required=True, choices=list(TABLE_IDS))
    p.add_argument("--paper-scale", action="store_true", help="full published resolutions")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", default="sweep_out")
    p.add_argument("--check", action="store_true", help="exit nonzero on any tolerance violation")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParameterError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
