"""Command-line entry points.

Exit codes: 0 success, 2 infeasible scenario, 3 solver stalled, 4 bad
configuration.  Failures also leave a machine-readable error.json in the
output directory.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .artifacts import read_beamformers, run_solve, run_sweep, write_beampattern
from .errors import Infeasible, IsacBeamError, ParseError, Stalled, ValidationError
from .scenario import ScenarioConfig, load_scenario
from .solver import check_feasibility

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_STALLED = 3
EXIT_CONFIG = 4


def _load(args) -> ScenarioConfig:
    config = load_scenario(args.scenario)
    solver = config.solver
    if getattr(args, "beta_mode", None):
        solver = replace(solver, beta_mode=args.beta_mode)
    config = replace(config, solver=solver)
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    return config


def _write_error(out_dir: str, exc: Exception) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    if isinstance(exc, ValidationError):
        payload["error"]["field"] = exc.field
    (out / "error.json").write_text(json.dumps(payload) + "\n")


def _cmd_solve(args) -> int:
    config = _load(args)
    run_solve(config, args.out, comm_only=args.comm_only)
    print(f"artifacts written to {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load(args)
    path = run_sweep(config, args.axis, args.values, args.out, jobs=args.jobs)
    print(f"sweep summary at {path}")
    return EXIT_OK


def _cmd_feasibility(args) -> int:
    config = _load(args)
    feas = check_feasibility(config.build())
    payload = {
        "feasible": bool(feas.feasible),
        "minPower": feas.min_power,
        "powerBudget": config.power_budget,
        "marginDb": (
            10.0 * (np.log10(config.power_budget) - np.log10(feas.min_power))
            if feas.min_power > 0 and feas.feasible
            else None
        ),
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK if feas.feasible else EXIT_INFEASIBLE


def _cmd_beampattern(args) -> int:
    v = read_beamformers(args.beamformers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_beampattern(v, out / "beampattern.csv")
    print(f"pattern written to {out / 'beampattern.csv'}")
    return EXIT_OK


def _cmd_oracle_compare(args) -> int:
    exe = shutil.which("sdr-oracle")
    if exe is None:
        print(
            "sdr-oracle not installed; skipping cross-validation "
            "(install the sdr_oracle package to enable it)"
        )
        return EXIT_OK
    config = _load(args)
    primary_dir = Path(args.out) / "primary"
    run_solve(config, primary_dir)
    cmd = [
        exe, "compare",
        "--scenario", str(args.scenario),
        "--primary", str(primary_dir),
        "--out", str(args.out),
    ]
    proc = subprocess.run(cmd)
    return proc.returncode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isacbeam",
        description="Sensing-aware downlink beamforming via uplink-downlink duality",
    )
    parser.add_argument("--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one scenario and write artifacts")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--comm-only", action="store_true",
                   help="solve the power-minimization problem only, scaled to the budget")
    p.add_argument("--beta-mode", choices=["subgradient", "closed-form"])
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="re-solve along one scenario axis")
    p.add_argument("scenario")
    p.add_argument("--axis", required=True, choices=["power", "sinrDb", "priorStd"])
    p.add_argument("--values", required=True, type=float, nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--beta-mode", choices=["subgradient", "closed-form"])
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("feasibility", help="report the minimum power meeting the SINR targets")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_feasibility)

    p = sub.add_parser("beampattern", help="compute the pattern of saved beamformers")
    p.add_argument("--beamformers", required=True, help="beamformers.json from a solve")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_beampattern)

    p = sub.add_parser("oracle-compare", help="cross-validate against the SDR reference, if installed")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_oracle_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    out_dir = getattr(args, "out", ".")
    try:
        return args.func(args)
    except (ParseError, ValidationError, ValueError) as exc:
        _write_error(out_dir, exc)
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Infeasible as exc:
        _write_error(out_dir, exc)
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Stalled as exc:
        _write_error(out_dir, exc)
        print(f"stalled: {exc}", file=sys.stderr)
        return EXIT_STALLED
    except IsacBeamError as exc:
        _write_error(out_dir, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
