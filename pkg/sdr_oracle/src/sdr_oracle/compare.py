"""Cross-validation report between the primary solver's artifacts and the SDR."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

PEAK_WINDOW_DB = 30.0


class MissingArtifact(Exception):
    """An expected artifact file is absent."""


def read_pattern_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise MissingArtifact(str(path))
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    return rows[:, 0], rows[:, 2]  # grid, normalized dB


def pattern_deviation_db(
    grid_a: np.ndarray, db_a: np.ndarray, grid_b: np.ndarray, db_b: np.ndarray
) -> float:
    """Largest dB disagreement over grid points within 30 dB of either peak."""
    if grid_a.shape != grid_b.shape or np.abs(grid_a - grid_b).max() > 1e-9:
        raise ValueError("patterns live on different grids")
    mask = (db_a >= -PEAK_WINDOW_DB) | (db_b >= -PEAK_WINDOW_DB)
    return float(np.abs(db_a[mask] - db_b[mask]).max())


def compare_report(primary_dir: str | Path, sdr_dir: str | Path) -> dict:
    """Bound values, pattern deviation and timing ratio of the two artifact sets."""
    primary_dir, sdr_dir = Path(primary_dir), Path(sdr_dir)
    primary_result = primary_dir / "result.json"
    sdr_result = sdr_dir / "sdr_result.json"
    if not primary_result.exists():
        raise MissingArtifact(str(primary_result))
    if not sdr_result.exists():
        raise MissingArtifact(str(sdr_result))
    primary = json.loads(primary_result.read_text())
    sdr = json.loads(sdr_result.read_text())

    grid_p, db_p = read_pattern_csv(primary_dir / "beampattern.csv")
    grid_s, db_s = read_pattern_csv(sdr_dir / "sdr_beampattern.csv")
    deviation = pattern_deviation_db(grid_p, db_p, grid_s, db_s)

    primary_bcrb = float(primary["bcrb"])
    sdr_objective = float(sdr["objective"])
    report = {
        "primaryBcrb": primary_bcrb,
        "sdrObjective": sdr_objective,
        "extractedBcrb": float(sdr["extractedBcrb"]),
        "relativeDifference": abs(primary_bcrb - sdr_objective) / sdr_objective,
        "sdrIsLowerBound": sdr_objective <= primary_bcrb + 1e-8,
        "patternDeviationDb": deviation,
        "primaryWallTimeSec": float(primary.get("wallTimeSec", float("nan"))),
        "sdrWallTimeSec": float(sdr["wallTimeSec"]),
    }
    if report["primaryWallTimeSec"] > 0:
        report["wallTimeRatio"] = report["sdrWallTimeSec"] / report["primaryWallTimeSec"]
    return report
