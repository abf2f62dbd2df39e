#!/usr/bin/env python3
"""Parameter sweeps on the 8-antenna scenario: power budget, SINR targets, prior width."""

import argparse
from pathlib import Path

from isacbeam.artifacts import read_sweep, run_sweep
from isacbeam.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/sweeps")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    out = Path(args.out)
    config = load_scenario(SCENARIOS / "sweep_nt8.json")

    axes = {
        "power": [0.5, 1.0, 2.0, 4.0, 8.0],
        "sinrDb": [3.0, 6.0, 9.0, 12.0, 15.0],
        "priorStd": [1.0, 2.5, 5.0, 10.0, 15.0],
    }
    for axis, values in axes.items():
        path = run_sweep(config, axis, values, out / axis, jobs=args.jobs)
        print(f"{axis}:")
        for row in read_sweep(path):
            print(f"  {row['value']:8.3f}  bcrb={row['bcrb']:.6g}  power={row['power']:.4f}  [{row['status']}]")


if __name__ == "__main__":
    main()
