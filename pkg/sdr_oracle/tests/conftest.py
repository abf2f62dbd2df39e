"""Helpers: scenario file generation and primary-solver invocation via its CLI."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

SCENARIO_DIR = Path(__file__).resolve().parent.parent.parent / "scenarios"


def make_scenario_file(
    path,
    n_tx=6,
    angles=(-30.0, 50.0),
    targets_db=(8.0, 10.0),
    noise=0.1,
    budget=1.0,
    prior_std=5.0,
    explicit_h=None,
    gap_tol=1e-4,
):
    data = {
        "schemaVersion": 1,
        "nTx": n_tx,
        "nRx": n_tx,
        "symbols": 1,
        "noisePower": noise,
        "powerBudget": budget,
        "sinrTargetsDb": list(targets_db),
        "sensing": {
            "priorMeanDeg": 0.0,
            "pathGain": [1.0, 0.0],
            "priorStdDeg": prior_std,
            "quadratureOrder": 80,
        },
        "solver": {"gapTol": gap_tol, "maxIterations": 500},
    }
    if explicit_h is not None:
        data["channel"] = {
            "type": "explicit",
            "re": np.real(explicit_h).tolist(),
            "im": np.imag(explicit_h).tolist(),
        }
    else:
        data["channel"] = {
            "type": "los",
            "anglesDeg": list(angles),
            "gains": [1.0] * len(targets_db),
        }
    Path(path).write_text(json.dumps(data))
    return Path(path)


def run_primary(scenario_path, out_dir):
    """Drive the primary solver through its CLI; returns the parsed result."""
    proc = subprocess.run(
        [sys.executable, "-m", "isacbeam", "solve", str(scenario_path), "--out", str(out_dir)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads((Path(out_dir) / "result.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(777)
