"""Command-line interface.

Subcommands:
    run     Integrate one configured benchmark and print its error report.
    tables  Emit the convergence-study tables (unfiltered and filtered).
    kernel  Print delta-kernel diagnostics or plot-ready samples.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from .cases import CaseError
from .config import ConfigError, config_from_dict, load_config
from .diagnostics import (DiagnosticsError, eoc_table, format_table,
                          table_csv)
from .kernel import DeltaKernelError, build_kernel
from .mesh import MeshError
from .output import OutputError
from .physics import AdmissibilityError
from .refelem import ReferenceElementError
from .siacfilter import FilterError
from .solver import SolverError

_CONFIG_ERRORS = (ConfigError, CaseError)
_NUMERICAL_ERRORS = (SolverError, AdmissibilityError, FilterError,
                     DeltaKernelError, DiagnosticsError, MeshError,
                     ReferenceElementError, OutputError, FloatingPointError)

# Convergence-suite definitions: (title, filter block or None, mesh labels).
# Labels count elements per unit length; the benchmark domain spans two
# units per direction, so label L maps to a (2L x 2L) element grid.
_CONVERGENCE_SUITE = [
    ("unfiltered", None, (1, 2, 4, 8, 16)),
    ("filtered m=1 k=6 width-scale 0.8",
     {"enabled": True, "m": 1, "k": 6, "n_d": 0.8,
      "mode": "always-on", "sigma_min": 0.0, "sigma_max": 0.0,
      "indicator": "density"},
     (10, 20, 40)),
    ("filtered m=3 k=6 width-scale 2.5",
     {"enabled": True, "m": 3, "k": 6, "n_d": 2.5,
      "mode": "always-on", "sigma_min": 0.0, "sigma_max": 0.0,
      "indicator": "density"},
     (2, 4, 8, 16)),
    ("filtered m=5 k=7 width-scale 4.5",
     {"enabled": True, "m": 5, "k": 7, "n_d": 4.5,
      "mode": "always-on", "sigma_min": 0.0, "sigma_max": 0.0,
      "indicator": "density"},
     (1, 2, 4, 8)),
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgsiac",
        description="High-order DG solver with adaptive shock filtering.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configured benchmark")
    p_run.add_argument("--config", required=True,
                       help="TOML configuration file")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="dotted-key override, TOML-literal value "
                            "(repeatable)")
    p_run.add_argument("--quiet", action="store_true",
                       help="suppress progress output on stderr")

    p_tab = sub.add_parser("tables", help="emit convergence-study tables")
    p_tab.add_argument("--suite", required=True, choices=["convergence"])
    p_tab.add_argument("--levels", type=int, default=0,
                       help="cap the number of mesh levels per table "
                            "(0 = all)")
    p_tab.add_argument("--csv-dir", default=None,
                       help="also write each table as CSV into this "
                            "directory")
    p_tab.add_argument("--quiet", action="store_true",
                       help="suppress progress output on stderr")

    p_ker = sub.add_parser("kernel", help="delta-kernel diagnostics")
    p_ker.add_argument("--m", type=int, required=True,
                       help="number of vanishing moments (>= 1)")
    p_ker.add_argument("--k", type=int, required=True,
                       help="endpoint smoothness order (>= 0)")
    p_ker.add_argument("--plot-data", action="store_true",
                       help="print CSV samples of the kernel on [-1, 1]")
    p_ker.add_argument("--samples", type=int, default=401,
                       help="number of sample points with --plot-data")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config, args.override)

    def progress(step, t, dt):
        if not args.quiet and step % 50 == 0:
            print(f"  step {step:6d}  t={t:.6e}  dt={dt:.3e}",
                  file=sys.stderr)

    from .driver import run
    result = run(config, progress=progress)
    print(f"case {config.case}: {result.steps} steps to t={result.t:.10g}")
    for line in result.report.lines():
        print(line)
    for path in result.written_files:
        print(f"wrote {path}")
    return 0


def _cmd_tables(args) -> int:
    from .driver import run
    outputs = []
    for title, filt, levels in _CONVERGENCE_SUITE:
        if args.levels > 0:
            levels = levels[:args.levels]
        errors = []
        cons = []
        for label in levels:
            n_elem = 2 * label
            data = {"case": "convergence", "n": 7,
                    "n_elem_x": n_elem, "n_elem_y": n_elem, "cfl": 0.1}
            data["filter"] = dict(filt) if filt else {"enabled": False}
            config = config_from_dict(data)
            if not args.quiet:
                print(f"[{title}] running {n_elem}x{n_elem} ...",
                      file=sys.stderr)
            result = run(config)
            errors.append(result.report.linf["rho"])
            cons.append(result.report.conservation["rho"])
        headers, rows = eoc_table(list(levels), errors, cons)
        text = format_table(headers, rows)
        outputs.append((title, headers, rows, text))
        print(f"\n# convergence suite: {title} (degree 7, cfl 0.1)")
        print("# mesh column counts elements per unit length; the domain "
              "spans 2 units per direction")
        print(text)
    if args.csv_dir is not None:
        import os
        os.makedirs(args.csv_dir, exist_ok=True)
        for i, (title, headers, rows, _) in enumerate(outputs, start=1):
            path = os.path.join(args.csv_dir, f"convergence_{i}.csv")
            with open(path, "w", encoding="ascii") as handle:
                handle.write(f"# {title}\n")
                handle.write(table_csv(headers, rows))
            print(f"wrote {path}")
    return 0


def _cmd_kernel(args) -> int:
    if args.m < 1:
        raise ConfigError(f"--m must be >= 1, got {args.m}")
    if args.k < 0:
        raise ConfigError(f"--k must be >= 0, got {args.k}")
    if args.samples < 2:
        raise ConfigError(f"--samples must be >= 2, got {args.samples}")
    kernel = build_kernel(args.m, args.k)
    if args.plot_data:
        xs = np.linspace(-1.0, 1.0, args.samples)
        values = kernel.eval_p(xs)
        print("xi,P")
        for x, v in zip(xs, values):
            print(f"{x:.17g},{v:.17g}")
    else:
        mass = float(np.polynomial.legendre.leggauss(kernel.degree + 2)[1] @
                     kernel.eval_p(np.polynomial.legendre.leggauss(
                         kernel.degree + 2)[0]))
        print(f"delta kernel m={args.m} k={args.k}")
        print(f"degree           : {kernel.degree}")
        print(f"conditions       : {kernel.degree + 1}")
        print(f"condition number : {kernel.condition_estimate:.3e}")
        print(f"mass             : {mass:.17g}")
        print(f"P(-1)            : {kernel.eval_p(-1.0):.3e}")
        print(f"P(+1)            : {kernel.eval_p(1.0):.3e}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "tables":
            return _cmd_tables(args)
        return _cmd_kernel(args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
