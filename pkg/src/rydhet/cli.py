"""Command-line interface: ``rydhet sweep | optimize | validate``.

Exit codes: 0 ok, 1 configuration error, 2 I/O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .config import MHZ, ConfigError, RunConfig
from .errors import (
    ConsistencyError,
    ContractViolation,
    IntegrationError,
    NonphysicalRangeError,
    NumericalError,
    ObjectiveError,
    SettlingTimeout,
)
from .optimize import SOLVERS
from .sweep import run_sweep
from .validation import run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (
    NumericalError, IntegrationError, SettlingTimeout, ConsistencyError, ObjectiveError,
    NonphysicalRangeError, ContractViolation, FloatingPointError, np.linalg.LinAlgError,
)


class _IOFailure(Exception):
    pass


def _load(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        return RunConfig.load(path)
    except OSError as exc:
        raise _IOFailure(f"cannot read config {path}: {exc.strerror or exc}") from exc


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def cmd_sweep(args) -> int:
    config = _load(args.config)
    result = run_sweep(config, jobs=args.jobs)
    _emit(result.render(config.outputs.format), args.out or config.outputs.path)
    return EXIT_OK


def cmd_optimize(args) -> int:
    config = _load(args.config)
    atom, drive, readout = config.atom_system(), config.drive_config(), config.readout_config()
    opt = config.optimize
    if args.problem == "p5":
        gammas = None if opt.gamma_t_mhz is None else np.asarray(opt.gamma_t_mhz) * MHZ
        report = SOLVERS["p5"](atom, drive, readout, gammas=gammas)
    else:
        window = (opt.window_mhz[0] * MHZ, opt.window_mhz[1] * MHZ)
        report = SOLVERS[args.problem](atom, drive, readout, window=window,
                                       coarse_n=opt.coarse_n, refine_iters=opt.refine_iters)
    body = report.to_dict()
    body["optimum_mhz"] = report.optimum / MHZ
    meta = {
        "package": "rydhet",
        "description": config.description,
        "config": config.to_dict(),
        "config_hash": config.digest(),
        "problem": args.problem,
        "resolved_omega_L_mhz": drive.omega_L / MHZ,
        "units": {"optimum": "rad/s", "optimum_mhz": "2*pi*MHz", "kappa": "W*s", "gain_db": "dB"},
    }
    text = json.dumps(_jsonable({"meta": meta, "report": body}), sort_keys=True, indent=1) + "\n"
    _emit(text, args.out or config.outputs.path)
    return EXIT_OK


def cmd_validate(args) -> int:
    config = _load(args.config)
    results = run_validation(config.atom_system(), config.drive_config(), config.readout_config())
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydhet",
                                     description="Heterodyne Rydberg receiver steady-state model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="tabulate chi and kappa along one axis")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="output path (default: config outputs.path or stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for numeric sweeps")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="solve one operating-point problem")
    p.add_argument("--config", required=True)
    p.add_argument("--problem", required=True, choices=sorted(SOLVERS))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("validate", help="check closed forms against the numerical oracle")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
