"""CLI: solve the relaxation for a scenario, or compare against primary artifacts."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .compare import compare_report
from .extract import downlink_sinr, extract_beamformers
from .scenario import load_oracle_scenario, steering
from .sdp import fim_of_gram, solve_sdr, trace_inverse

FLOAT_FMT = "%.17g"


def write_pattern_csv(v: np.ndarray, path: Path) -> None:
    grid = -90.0 + 0.1 * np.arange(1801)
    a = np.stack([steering(v.shape[0], t) for t in np.deg2rad(grid)], axis=1)
    gains = np.sum(np.abs(a.conj().T @ v) ** 2, axis=1)
    db = 10.0 * np.log10(gains / gains.max())
    lines = ["theta_deg,gain_linear,gain_db"]
    for row in zip(grid, gains, db):
        lines.append(",".join(FLOAT_FMT % x for x in row))
    path.write_text("\n".join(lines) + "\n")


def run_sdr(scenario_path: str | Path, out_dir: str | Path, seed: int = 0) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = load_oracle_scenario(scenario_path)
    solution = solve_sdr(scenario)
    gram = sum(solution.covariances)
    consistency = trace_inverse(fim_of_gram(scenario, gram))
    extraction = extract_beamformers(solution, scenario, seed=seed)
    sinr_db = 10.0 * np.log10(downlink_sinr(extraction.v, scenario.h, scenario.sigma2))
    result = {
        "schemaVersion": 1,
        "objective": solution.objective,
        "objectiveAtCovariances": consistency,
        "extractedBcrb": extraction.bcrb,
        "usedRandomization": extraction.used_randomization,
        "rankRatios": solution.rank_ratios.tolist(),
        "achievedSinrDb": sinr_db.tolist(),
        "totalPower": float(np.sum(np.abs(extraction.v) ** 2)),
        "solverStatus": solution.solver_status,
        "solver": solution.solver_name,
        "seed": seed,
        "wallTimeSec": solution.wall_time_sec,
    }
    (out / "sdr_result.json").write_text(json.dumps(result, indent=2) + "\n")
    write_pattern_csv(extraction.v, out / "sdr_beampattern.csv")
    return result


def _cmd_solve(args) -> int:
    result = run_sdr(args.scenario, args.out, seed=args.seed)
    print(
        f"objective={result['objective']:.8g} extracted={result['extractedBcrb']:.8g} "
        f"status={result['solverStatus']} ({result['wallTimeSec']:.2f} s)"
    )
    return 0


def _cmd_compare(args) -> int:
    run_sdr(args.scenario, args.out, seed=args.seed)
    report = compare_report(args.primary, args.out)
    out = Path(args.out)
    (out / "compare_report.json").write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report, indent=2))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sdr-oracle",
        description="Semidefinite-relaxation reference for the duality beamformer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the relaxation, write sdr_result.json and pattern")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("compare", help="solve and compare against primary artifacts")
    p.add_argument("--scenario", required=True)
    p.add_argument("--primary", required=True, help="directory with result.json and beampattern.csv")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surfaced as text; callers read the exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
