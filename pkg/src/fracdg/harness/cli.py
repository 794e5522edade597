"""Command-line entry point: ``fracdg {solve,time-study,space-study,verify,compare}``."""

from __future__ import annotations

import argparse
import csv
import sys
import time

from ..dgstepper import run
from ..fem1d import SpaceGrid
from ..timemesh import graded_mesh
from .config import CONFIG_KEYS, load_config
from .reference import compare_reference
from .study import ConvergenceReport, ReportRow, fine_grid_error, space_gamma, space_study, time_study
from .verify import CHECKS, verify_suite

__all__ = ["main"]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    for key, (_, help_text) in CONFIG_KEYS.items():
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        p.add_argument(*flags, dest=key, default=None, metavar="VALUE", help=help_text)


def _config(args):
    overrides = {k: getattr(args, k) for k in CONFIG_KEYS}
    return load_config(args.config, overrides)


def _reference_arg(config):
    if config.reference is None:
        return None
    return None if config.reference == "builtin" else config.reference


def _finish_report(report: ConvergenceReport, config, out) -> int:
    status = 0
    if config.reference is not None:
        cmp = compare_reference(report, _reference_arg(config), config.error_rel, config.rate_abs)
        report = cmp.report
        print(cmp.format(), file=out)
        for key, verdict in cmp.failures:
            print(f"{verdict}: {report.kind}={key}", file=out)
        print("overall: " + ("PASS" if cmp.passed else "FAIL"), file=out)
        status = 0 if cmp.passed else 1
    else:
        print(report.format(), file=out)
    if config.output:
        report.to_csv(config.output)
        print(f"wrote {config.output}", file=out)
    return status


def _progress(label, out):
    start = time.perf_counter()

    def cb(key, err):
        print(f"  {label}={key:<6} error={err:.4e}  [{time.perf_counter() - start:.1f}s]", file=out, flush=True)

    return cb


def cmd_solve(args, out) -> int:
    config = _config(args)
    problem = config.build_problem()
    mesh = graded_mesh(config.n_steps, config.gamma, problem.T)
    grid = SpaceGrid(config.m_elements)
    sol = run(problem, mesh, grid, initial=config.initial)
    print(
        f"solved {problem.name} mu={config.mu:g} N={mesh.N} gamma={config.gamma:g} M={grid.M}; "
        f"max step backward error {sol.residuals.max():.2e}",
        file=out,
    )
    if problem.exact is not None:
        err = fine_grid_error(sol, problem.exact, config.fine_m, config.limits)
        print(f"fine-grid max error {err:.4e}", file=out)
    if config.output:
        sol.to_csv(config.output)
        print(f"wrote {config.output}", file=out)
    return 0


def cmd_time_study(args, out) -> int:
    config = _config(args)
    print(f"time study: {config.problem} mu={config.mu:g} gamma={config.gamma:g} M={config.m_elements}", file=out)
    report = time_study(config, _progress("N", out))
    return _finish_report(report, config, out)


def cmd_space_study(args, out) -> int:
    config = _config(args)
    gamma = space_gamma(config, config.build_problem())
    print(f"space study: {config.problem} mu={config.mu:g} N={config.n_steps} gamma={gamma:g}", file=out)
    report = space_study(config, _progress("M", out))
    return _finish_report(report, config, out)


def cmd_verify(args, out) -> int:
    names = args.checks.split(",") if args.checks else None
    verdicts = verify_suite(names, lambda v, dt: print(v.format(), file=out, flush=True))
    ok = all(v.passed for v in verdicts)
    print("overall: " + ("PASS" if ok else "FAIL"), file=out)
    return 0 if ok else 1


def read_report(path, kind: str, mu: float, gamma: float | None) -> ConvergenceReport:
    """Load a report CSV written by a study (columns key, error, rate, ...)."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rate = rec.get("rate", "").strip()
            rows.append(ReportRow(int(rec["key"]), float(rec["error"]), float(rate) if rate else None))
    return ConvergenceReport(kind, mu, gamma, rows)


def cmd_compare(args, out) -> int:
    config = _config(args)
    gamma = None if args.kind == "M" else config.gamma
    report = read_report(args.report, args.kind, config.mu, gamma)
    if config.reference is None:
        config.reference = "builtin"
    return _finish_report(report, config, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdg",
        description="DG-in-time / P1-in-space solver for time-fractional diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="single run; writes the node values as CSV to --output")
    _add_config_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("time-study", help="refine N with M fixed; errors and rates")
    _add_config_flags(p)
    p.set_defaults(func=cmd_time_study)

    p = sub.add_parser("space-study", help="refine M with a fine graded time mesh")
    _add_config_flags(p)
    p.set_defaults(func=cmd_space_study)

    p = sub.add_parser("verify", help="seeded oracle, projection and operator-inequality checks")
    p.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="compare a report CSV against reference tables")
    p.add_argument("report", help="CSV written by time-study or space-study")
    p.add_argument("--kind", choices=("N", "M"), default="N", help="N for time tables, M for the space table")
    _add_config_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
