"""Command-line entry point: run configs, run shipped cases, list cases."""

from __future__ import annotations

import argparse
import os
import sys


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosserat-dem",
        description="Cell-centered variational DEM solver for Cosserat elasticity.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a TOML config file")
    run.add_argument("config", help="path to the run configuration")
    _add_overrides(run)

    case = sub.add_parser("case", help="run a shipped case by name")
    case.add_argument("name", help="case name (see `cosserat-dem list`)")
    _add_overrides(case)

    sub.add_parser("list", help="list shipped cases")
    return parser


def _add_overrides(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--output-dir", default=None,
                     help="directory for VTK/CSV/report artifacts")
    sub.add_argument("--refine", type=int, default=None,
                     help="mesh refinement level (negative coarsens)")
    sub.add_argument("--solver", choices=("direct", "krylov"), default=None,
                     help="linear solver backend")
    sub.add_argument("--dt", type=float, default=None,
                     help="time step override for dynamic cases")
    sub.add_argument("--threads", type=int, default=None,
                     help="cap BLAS/OpenMP thread counts")
    sub.add_argument("--emit", action="append", default=None,
                     choices=("vtk", "csv", "report"),
                     help="artifact kinds to write (repeatable)")
    return sub


def _set_threads(n: int) -> None:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(n))


def _apply_overrides(options, args) -> None:
    if args.output_dir is not None:
        options.output_dir = args.output_dir
    if args.refine is not None:
        options.refine = args.refine
    if args.solver is not None:
        options.solver = args.solver
    if args.dt is not None:
        options.dt = args.dt
    if args.emit:
        options.emit = tuple(dict.fromkeys(args.emit))


def _print_report(result) -> None:
    report = result.report
    print(f"case: {report.case}")
    if result.mesh is not None:
        print(f"mesh: {result.mesh.num_cells} cells (dim {result.mesh.dim})")
    for cs in report.components:
        line = f"  {cs.name:<9s} range [{cs.min: .6g}, {cs.max: .6g}]"
        if cs.max_rel_error is not None:
            line += f"  max rel err {cs.max_rel_error:.3e}"
        elif cs.max_abs_error is not None:
            line += f"  max abs err {cs.max_abs_error:.3e}"
        print(line)
    for name, err in report.l2_errors.items():
        print(f"  L2 rel error {name}: {err:.3e}")
    for row in report.table:
        got, want = row["computed"], row["expected"]
        line = f"  {row['variant']:<14s} computed {got:.4f}"
        if want:
            line += f"  expected {want:.4f}  err {row['rel_error']:+.2%}"
        print(line)
    for name, value in report.metrics.items():
        print(f"  {name}: {value:.6g}" if isinstance(value, float)
              else f"  {name}: {value}")
    for path in result.artifacts:
        print(f"wrote {path}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        _set_threads(args.threads)

    # heavy imports after the thread caps are in place
    from .cases import CaseError, builtin_cases, run_case
    from .config import ConfigError, load_config

    if args.command == "list":
        registry = builtin_cases()
        width = max(len(n) for n in registry)
        for name in sorted(registry):
            print(f"{name:<{width}s}  {registry[name].description}")
        return 0

    try:
        if args.command == "run":
            spec, options = load_config(args.config)
        else:
            registry = builtin_cases()
            if args.name not in registry:
                known = ", ".join(sorted(registry))
                print(f"unknown case {args.name!r}; shipped cases: {known}",
                      file=sys.stderr)
                return 2
            spec = registry[args.name]
            from .cases import RunOptions
            options = RunOptions()
        _apply_overrides(options, args)
        result = run_case(spec, options)
    except (ConfigError, CaseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print_report(result)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
