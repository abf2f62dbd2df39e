"""Run drivers that write the on-disk artifacts (see SCHEMA.md for formats)."""

from __future__ import annotations

import concurrent.futures
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import beampattern, fim
from .errors import Infeasible, IsacBeamError
from .problem import downlink_sinr
from .scenario import ScenarioConfig
from .solver import SolveReport, check_feasibility, solve

FLOAT_FMT = "%.17g"


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) if isinstance(x, (float, np.floating)) else str(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_beamformers(v: np.ndarray, path: Path) -> None:
    data = {
        "nTx": v.shape[0],
        "K": v.shape[1],
        "v": [[[float(c.real), float(c.imag)] for c in row] for row in v],
    }
    path.write_text(json.dumps(data) + "\n")


def read_beamformers(path: str | Path) -> np.ndarray:
    data = json.loads(Path(path).read_text())
    arr = np.array(data["v"], dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def write_beampattern(v: np.ndarray, path: Path) -> None:
    grid, gains, db = beampattern.beam_pattern(v)
    _write_csv(path, ["theta_deg", "gain_linear", "gain_db"], zip(grid, gains, db))


def write_trace(report: SolveReport, path: Path) -> None:
    rows = [
        (r.iteration, r.lam, r.dual, r.primal, r.gap, r.step, r.retries)
        for r in report.trace
    ]
    _write_csv(path, ["iter", "lambda", "dual", "primal", "gap", "step", "retries"], rows)


@dataclass
class RunArtifacts:
    out_dir: Path
    result: dict


def run_solve(config: ScenarioConfig, out_dir: str | Path, comm_only: bool = False) -> RunArtifacts:
    """Solve one scenario and write result.json, beamformers.json, beampattern.csv, trace.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = config.build()
    start = time.perf_counter()
    if comm_only:
        feas = check_feasibility(scenario)
        if not feas.feasible:
            raise Infeasible(f"minimum power {feas.min_power:.6g} exceeds budget")
        v = feas.v_comm * np.sqrt(scenario.power_budget / fim.total_power(feas.v_comm))
        j = fim.bfim(scenario.stats, v, scenario.t_symbols, scenario.sigma2)
        result = {
            "schemaVersion": 1,
            "mode": "comm-only",
            "bcrb": fim.bcrb(j),
            "dualValue": None,
            "gap": None,
            "achievedSinrDb": (10.0 * np.log10(downlink_sinr(v, scenario.h, scenario.sigma2))).tolist(),
            "totalPower": fim.total_power(v),
            "minPower": feas.min_power,
            "iterations": 0,
            "seed": config.seed,
            "status": "converged",
        }
        report = None
    else:
        report = solve(scenario, config.solver)
        v = report.v
        result = {
            "schemaVersion": 1,
            "mode": "isac",
            "bcrb": report.bcrb,
            "dualValue": report.dual_value,
            "gap": report.gap,
            "relativeGap": report.relative_gap,
            "achievedSinrDb": (10.0 * np.log10(report.achieved_sinr)).tolist(),
            "totalPower": report.total_power,
            "minPower": report.min_power,
            "iterations": report.iterations,
            "seed": config.seed,
            "status": report.status,
        }
    result["wallTimeSec"] = time.perf_counter() - start
    (out / "result.json").write_text(json.dumps(result, indent=2) + "\n")
    write_beamformers(v, out / "beamformers.json")
    write_beampattern(v, out / "beampattern.csv")
    if report is not None:
        write_trace(report, out / "trace.csv")
    return RunArtifacts(out_dir=out, result=result)


def _sweep_config(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    from dataclasses import replace

    if axis == "power":
        return replace(config, power_budget=float(value))
    if axis == "sinrDb":
        targets = np.full(config.n_users, float(value))
        return replace(config, sinr_targets_db=targets)
    if axis == "priorStd":
        return replace(config, sensing=replace(config.sensing, prior_std_deg=float(value)))
    raise ValueError(f"unknown sweep axis {axis!r}")


def _sweep_point(args):
    config, axis, value, point_dir = args
    start = time.perf_counter()
    try:
        artifacts = run_solve(_sweep_config(config, axis, value), point_dir)
        r = artifacts.result
        return (value, r["bcrb"], r["gap"], r["totalPower"], time.perf_counter() - start, "ok")
    except IsacBeamError as exc:
        Path(point_dir).mkdir(parents=True, exist_ok=True)
        (Path(point_dir) / "error.json").write_text(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n"
        )
        return (value, np.nan, np.nan, np.nan, time.perf_counter() - start, type(exc).__name__)


def run_sweep(
    config: ScenarioConfig,
    axis: str,
    values,
    out_dir: str | Path,
    jobs: int = 1,
) -> Path:
    """One solve per axis value; failures are recorded and the sweep continues."""
    values = [float(v) for v in values]
    if sorted(values) != values:
        raise ValueError("axis values must be sorted ascending")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (config, axis, value, out / f"point_{i:03d}") for i, value in enumerate(values)
    ]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    path = out / "sweep.csv"
    _write_csv(path, ["value", "bcrb", "gap", "power", "runtime_sec", "status"], rows)
    return path


def read_sweep(path: str | Path) -> list[dict]:
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        for key in ("value", "bcrb", "gap", "power", "runtime_sec"):
            row[key] = float(row[key])
        rows.append(row)
    return rows
