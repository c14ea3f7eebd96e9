"""Command line interface: ``spinbec solve | presets | check``."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .config import load_config, serialize_config
from .errors import ConfigurationError, NumericalError, SpinBECError
from .presets import list_presets
from .solver import cascadic_solve

log = logging.getLogger("spinbec")

EXIT_OK = 0
EXIT_MAXITER = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4
REVERSAL_TOL = 1e-8


def _m_label(M):
    return f"M={M:g}"


def run(cfg, out_dir=None) -> tuple:
    """Solve one configuration and write all result files. Returns ``(exit code, summary)``."""
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.toml").write_text(serialize_config(cfg), encoding="utf-8")
    records = []
    summary = {"F": cfg.F, "d": cfg.d, "n": list(cfg.n), "M": cfg.M,
               "retraction": cfg.solver.retraction}
    try:
        report = cascadic_solve(cfg.problem(), cfg.solver, callback=records.append)
    except NumericalError as err:
        io.write_trace(out / "trace.csv", records)
        summary.update(status="numerical-failure", error=str(err))
        io.write_summary(out / "summary.json", summary)
        log.error("numerical failure: %s", err)
        return EXIT_NUMERICAL, summary
    dump = io.StateDump.from_state(report.X, report.grid, cfg.F, cfg.M, report.energy,
                                   report.grad_norm)
    io.write_trace(out / "trace.csv", report.records)
    io.write_state_dump(out / "state.bin", dump)
    io.write_slice(out / "slice.csv", dump)
    if cfg.plane and cfg.d >= 2:
        io.write_plane(out / "plane.csv", dump)
    summary.update(
        energy=report.energy, grad_norm=report.grad_norm, iterations=report.iterations,
        converged=report.converged, status=report.status, wall_time=report.wall_time,
        levels=[{"n": list(l.n), "rgbb_iters": l.rgbb_iters, "arnt_iters": l.arnt_iters,
                 "mean_inner_iters": l.mean_inner, "energy": l.energy, "grad_norm": l.grad_norm}
                for l in report.levels])
    io.write_summary(out / "summary.json", summary)
    log.info("E = %.10f, |grad| = %.2e, %s", report.energy, report.grad_norm, report.status)
    return (EXIT_OK if report.converged else EXIT_MAXITER), summary


def _run_job(args):
    cfg, out_dir, verbosity = args
    _setup_logging(verbosity)
    return run(cfg, out_dir)


def reversal_check(cfg, out_dir) -> tuple:
    """Solve at ``M`` and ``-M`` and compare energies and reversed component moduli."""
    out = Path(out_dir)
    code_p, s_p = run(cfg, out / "forward")
    code_m, s_m = run(cfg.with_magnetization(-cfg.M), out / "reversed")
    if EXIT_NUMERICAL in (code_p, code_m):
        return EXIT_NUMERICAL, {}
    a = io.read_state_dump(out / "forward" / "state.bin")
    b = io.read_state_dump(out / "reversed" / "state.bin")
    dE = abs(a.energy - b.energy)
    dphi = float(np.max(np.abs(np.abs(a.phi) - np.abs(b.phi[::-1]))))
    result = {"energy_forward": a.energy, "energy_reversed": b.energy, "energy_gap": dE,
              "max_modulus_gap": dphi, "passed": dE <= REVERSAL_TOL}
    io.write_summary(out / "reversal.json", result)
    print(f"reversal check: |dE| = {dE:.3e}, max ||phi_l| - |phi_-l|| = {dphi:.3e} "
          f"-> {'pass' if result['passed'] else 'FAIL'}")
    if not result["passed"]:
        return EXIT_NUMERICAL, result
    return max(code_p, code_m), result


def _apply_overrides(cfg, args):
    changes = {}
    if args.retraction:
        changes["retraction"] = args.retraction
    if args.levels is not None:
        changes["levels"] = args.levels
    if changes:
        cfg = replace(cfg, solver=cfg.solver.replace(**changes))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out:
        cfg = replace(cfg, out_dir=args.out)
    return cfg.validate()


def _parse_sweep(text):
    key, _, values = text.partition("=")
    if key.strip() != "M" or not values:
        raise ConfigurationError(f"--sweep expects M=v1,v2,..., got {text!r}")
    try:
        return [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"--sweep values must be numbers, got {values!r}") from None


def cmd_solve(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if args.sweep:
        Ms = _parse_sweep(args.sweep)
        jobs = [(cfg.with_magnetization(M), Path(cfg.out_dir) / _m_label(M), args.verbose) for M in Ms]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_job, jobs))
        for M, (code, summary) in zip(Ms, results):
            print(f"{_m_label(M)}: energy={summary.get('energy', float('nan')):.10f} "
                  f"gradnorm={summary.get('grad_norm', float('nan')):.2e} exit={code}")
        return max(code for code, _ in results)
    if args.check_reversal:
        code, _ = reversal_check(cfg, cfg.out_dir)
        return code
    code, summary = run(cfg)
    print(f"energy={summary.get('energy', float('nan')):.10f} "
          f"gradnorm={summary.get('grad_norm', float('nan')):.2e} status={summary.get('status')}")
    return code


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    print(f"ok: F={cfg.F} d={cfg.d} n={'x'.join(map(str, cfg.n))} M={cfg.M:g} "
          f"retraction={cfg.solver.retraction}")
    return EXIT_OK


def cmd_presets(args) -> int:
    sys.stdout.write(list_presets())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinbec", description="Ground states of spin-F condensates.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-vv for debug)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a configuration file")
    s.add_argument("config")
    s.add_argument("--retraction", choices=("projective", "orthogonal", "closedform"))
    s.add_argument("--levels", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.add_argument("--sweep", metavar="M=v1,v2,...", help="independent solves, one subdirectory each")
    s.add_argument("--jobs", type=int, default=None, help="worker processes for --sweep")
    s.add_argument("--check-reversal", action="store_true",
                   help="also solve at -M and compare with the component-reversed state")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="validate a configuration file without solving")
    c.add_argument("config")
    c.set_defaults(func=cmd_check)

    sub.add_parser("presets", help="list the built-in benchmark problems").set_defaults(func=cmd_presets)
    return p


def _setup_logging(verbosity):
    level = logging.WARNING - 10 * min(verbosity, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except ConfigurationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SpinBECError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
