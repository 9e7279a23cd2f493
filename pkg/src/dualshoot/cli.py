"""Command-line front end.

Subcommands: ground-state, branch, normalize, asymptotics, classify, verify.
All outputs are deterministic (fixed 17-significant-digit formatting, sorted
JSON keys): identical configs produce byte-identical files.

Exit codes: 0 success / all checks passed; 1 failure (solver error or failed
check); 2 verify ended with inconclusive checks only; 3 prescribed mass not
attained on the branch (verdict in normalize_verdict.json); 64 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, engine
from .asymptotics import Regime, mass_limit_ratios
from .branch import find_normalized_solutions, trace_branch
from .config import CATALOG_NAMES, load_config
from .errors import DualshootError, NoRootInBranch, UsageError
from .exports import (write_branch, write_asymptotics, write_classification,
                      write_json, write_profile, write_roots)
from .solver import shoot_ground_state
from .verify import SUITES, run_catalog, run_suite


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dualshoot",
                     description="Radial ground-state branches and normalized solutions "
                                 "of dual-transformed quasilinear Schrodinger equations.")
    parser.add_argument("--version", action="version", version=f"dualshoot {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help=f"run-config JSON path or catalog name ({', '.join(CATALOG_NAMES)})")
    common.add_argument("--out", default="out", help="output directory (default: ./out)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads (used by the verify catalog battery)")
    common.add_argument("--tol-scale", type=float, default=1.0, dest="tol_scale",
                        help="scale factor on verify pass tolerances")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground-state", parents=[common],
                       help="solve one radial ground state and export the profile")
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="frequency lambda > 0")

    sub.add_parser("branch", parents=[common],
                   help="trace the branch over the configured sweep and export branch.csv")

    p = sub.add_parser("normalize", parents=[common],
                       help="solve the prescribed-mass problem rho(lambda) = c")
    p.add_argument("--c", dest="c", type=float, required=True, help="prescribed mass c > 0")

    p = sub.add_parser("asymptotics", parents=[common],
                       help="rescaled-convergence and mass-law report")
    p.add_argument("--regime", choices=("small", "large", "both"), default="both")

    sub.add_parser("classify", parents=[common],
                   help="regime classification with threshold masses")

    p = sub.add_parser("verify", parents=[common],
                       help="run the verification battery and write verdict.json")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    return parser


def _require_config(args) -> object:
    if args.config is None:
        raise UsageError("this command requires --config")
    return load_config(args.config)


def _cmd_ground_state(args) -> int:
    if not args.lam > 0.0:
        raise UsageError("--lambda must be positive")
    cfg = _require_config(args)
    prof = shoot_ground_state(cfg.model, args.lam, cfg.shooting)
    csv_path, json_path = write_profile(args.out, "ground_state", prof)
    print(f"lambda={args.lam:g} v0={prof.v0:.12g} rho={prof.mass_dual:.12g} "
          f"pohozaev={prof.pohozaev_residual:.3g}")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _cmd_branch(args) -> int:
    cfg = _require_config(args)
    br = trace_branch(cfg.model, cfg.sweep, cfg.shooting)
    path = write_branch(args.out, br)
    print(f"traced {len(br.points)} points over lambda in "
          f"[{cfg.sweep.lambda_min:g}, {cfg.sweep.lambda_max:g}]; wrote {path}")
    for w in br.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _cmd_normalize(args) -> int:
    if not args.c > 0.0:
        raise UsageError("--c must be positive")
    cfg = _require_config(args)
    out = Path(args.out)
    try:
        roots, br, cls = find_normalized_solutions(cfg.model, args.c, cfg.sweep, cfg.shooting)
    except NoRootInBranch as exc:
        write_roots(out, [])
        write_json(out / "normalize_verdict.json",
                   {"c": args.c, "roots_found": 0, "verdict": exc.verdict})
        print(f"no root with mass c={args.c:g}: {exc.verdict}", file=sys.stderr)
        return 3
    entries = []
    for k, (lam, prof) in enumerate(roots):
        csv_path, _ = write_profile(out, f"root_{k}", prof)
        entries.append((lam, args.c, csv_path))
    path = write_roots(out, entries)
    print(f"{len(roots)} root(s) for c={args.c:g}: "
          + ", ".join(f"lambda={lam:.8g}" for lam, _ in roots))
    print(f"wrote {path}")
    return 0


def _cmd_asymptotics(args) -> int:
    cfg = _require_config(args)
    br = trace_branch(cfg.model, cfg.sweep, cfg.shooting)
    regimes = {"small": (Regime.SMALL_LAMBDA,), "large": (Regime.LARGE_LAMBDA,),
               "both": (Regime.SMALL_LAMBDA, Regime.LARGE_LAMBDA)}[args.regime]
    reports = [mass_limit_ratios(br, cfg.model, reg, cfg.shooting) for reg in regimes]
    path = write_asymptotics(args.out, reports)
    for rep in reports:
        row = rep.extreme_row
        print(f"{rep.regime.value}: at lambda={row.lam:g} mass_ratio={row.mass_ratio:.4f} "
              f"sup_diff={row.sup_diff:.4g} (limit {rep.limit_id})")
    print(f"wrote {path}")
    return 0


def _cmd_classify(args) -> int:
    cfg = _require_config(args)
    from .branch import classify_regime
    cls = classify_regime(cfg.model, cfg.shooting)
    path = write_classification(args.out, cls)
    print(f"case {cls.case_id} (alpha={cls.alpha:g}, beta={cls.beta:g}, "
          f"mass-critical exponent {cls.mass_critical:g})")
    for k, v in sorted(cls.thresholds.items()):
        print(f"  {k} = {v:.10g}")
    print(f"wrote {path}")
    return 0


def _cmd_verify(args) -> int:
    if args.config is None:
        verdict = run_catalog(args.suite, args.tol_scale, max(1, args.threads))
    else:
        verdict = run_suite(load_config(args.config), args.suite, args.tol_scale)
    for c in verdict.checks:
        print(f"{c.status.upper():12s} {c.id}: {c.description}")
    counts = verdict.counts
    print(f"{counts['pass']} passed, {counts['fail']} failed, "
          f"{counts['inconclusive']} inconclusive; {verdict.profiles_produced} profiles, "
          f"max pohozaev residual {verdict.max_pohozaev:.3g} [engine: {verdict.engine_name}]")
    path = write_json(Path(args.out) / "verdict.json", verdict.to_dict())
    print(f"wrote {path}")
    return verdict.exit_code


_COMMANDS = {
    "ground-state": _cmd_ground_state,
    "branch": _cmd_branch,
    "normalize": _cmd_normalize,
    "asymptotics": _cmd_asymptotics,
    "classify": _cmd_classify,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    except NoRootInBranch as exc:   # outside normalize this still means exit 3
        print(str(exc), file=sys.stderr)
        return 3
    except DualshootError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
