"""Scenario configuration: JSON schema, validation, channel materialization.

The on-disk format is versioned JSON (see SCHEMA.md).  Line-of-sight channels
are materialized as h_k = sqrt(gain_k) * a_T(theta_k); explicit channels
round-trip bit-exactly through save/load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .problem import Scenario
from .sensing import AoAModel, compute_statistics, steering_vector
from .solver import SolverOptions

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ChannelSpec:
    """Either explicit channel columns or line-of-sight angles with gains."""

    kind: str  # "los" or "explicit"
    angles_deg: np.ndarray | None = None
    gains: np.ndarray | None = None
    matrix: np.ndarray | None = None

    def materialize(self, n_tx: int) -> np.ndarray:
        if self.kind == "explicit":
            return self.matrix
        cols = [
            np.sqrt(g) * steering_vector(n_tx, np.deg2rad(a))
            for a, g in zip(self.angles_deg, self.gains)
        ]
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario file contents."""

    n_tx: int
    n_rx: int
    t_symbols: int
    sigma2: float
    power_budget: float
    sinr_targets_db: np.ndarray
    channel: ChannelSpec
    sensing: AoAModel
    solver: SolverOptions = field(default_factory=SolverOptions)
    seed: int = 0
    description: str = ""

    @property
    def n_users(self) -> int:
        return len(self.sinr_targets_db)

    def gammas(self) -> np.ndarray:
        return 10.0 ** (self.sinr_targets_db / 10.0)

    def channel_matrix(self) -> np.ndarray:
        return self.channel.materialize(self.n_tx)

    def build(self) -> Scenario:
        """Materialize channels and sensing statistics into a runtime instance."""
        return Scenario(
            h=self.channel_matrix(),
            gammas=self.gammas(),
            sigma2=self.sigma2,
            power_budget=self.power_budget,
            t_symbols=self.t_symbols,
            stats=compute_statistics(self.sensing),
        )


def _require(data: dict, key: str, path: str):
    if key not in data:
        raise ValidationError(f"{path}{key}", "missing required field")
    return data[key]


def _positive(value, path: str, kind=float):
    try:
        value = kind(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(path, f"expected {kind.__name__}") from exc
    if value <= 0:
        raise ValidationError(path, "must be positive")
    return value


def _parse_channel(data: dict, n_tx: int, n_users: int) -> ChannelSpec:
    kind = _require(data, "type", "channel.")
    if kind == "los":
        angles = np.asarray(_require(data, "anglesDeg", "channel."), dtype=float)
        gains = np.asarray(data.get("gains", np.ones(n_users)), dtype=float)
        if angles.shape != (n_users,):
            raise ValidationError("channel.anglesDeg", f"need {n_users} entries")
        if gains.shape != (n_users,):
            raise ValidationError("channel.gains", f"need {n_users} entries")
        if np.any(gains <= 0):
            raise ValidationError("channel.gains", "must be positive")
        return ChannelSpec(kind="los", angles_deg=angles, gains=gains)
    if kind == "explicit":
        re = np.asarray(_require(data, "re", "channel."), dtype=float)
        im = np.asarray(_require(data, "im", "channel."), dtype=float)
        if re.shape != (n_tx, n_users) or im.shape != (n_tx, n_users):
            raise ValidationError("channel.re", f"need shape ({n_tx}, {n_users})")
        return ChannelSpec(kind="explicit", matrix=re + 1j * im)
    raise ValidationError("channel.type", f"unknown channel type {kind!r}")


def _parse_sensing(data: dict, n_tx: int, n_rx: int) -> AoAModel:
    gain = data.get("pathGain", [1.0, 0.0])
    if not isinstance(gain, (list, tuple)) or len(gain) != 2:
        raise ValidationError("sensing.pathGain", "expected [re, im]")
    try:
        return AoAModel(
            n_tx=n_tx,
            n_rx=n_rx,
            path_gain=complex(float(gain[0]), float(gain[1])),
            prior_mean_deg=float(data.get("priorMeanDeg", 0.0)),
            prior_std_deg=_positive(_require(data, "priorStdDeg", "sensing."), "sensing.priorStdDeg"),
            quadrature_order=int(data.get("quadratureOrder", 80)),
        )
    except ValueError as exc:
        raise ValidationError("sensing", str(exc)) from exc


def _parse_solver(data: dict) -> SolverOptions:
    try:
        return SolverOptions(
            gap_tol=float(data.get("gapTol", 1e-3)),
            max_iterations=int(data.get("maxIterations", 500)),
            beta_mode=str(data.get("betaMode", "subgradient")),
            uplink_tol=float(data.get("uplinkTol", 1e-10)),
            uplink_max_iterations=int(data.get("uplinkMaxIterations", 10_000)),
        )
    except ValueError as exc:
        raise ValidationError("solver", str(exc)) from exc


def parse_scenario(data: dict) -> ScenarioConfig:
    version = _require(data, "schemaVersion", "")
    if version != SCHEMA_VERSION:
        raise ValidationError("schemaVersion", f"unsupported version {version!r}")
    n_tx = int(_positive(_require(data, "nTx", ""), "nTx", int))
    n_rx = int(_positive(_require(data, "nRx", ""), "nRx", int))
    targets = np.asarray(_require(data, "sinrTargetsDb", ""), dtype=float)
    if targets.ndim != 1 or targets.size == 0:
        raise ValidationError("sinrTargetsDb", "need a nonempty list")
    channel = _parse_channel(_require(data, "channel", ""), n_tx, targets.size)
    sensing = _parse_sensing(_require(data, "sensing", ""), n_tx, n_rx)
    return ScenarioConfig(
        n_tx=n_tx,
        n_rx=n_rx,
        t_symbols=int(_positive(data.get("symbols", 1), "symbols", int)),
        sigma2=_positive(_require(data, "noisePower", ""), "noisePower"),
        power_budget=_positive(_require(data, "powerBudget", ""), "powerBudget"),
        sinr_targets_db=targets,
        channel=channel,
        sensing=sensing,
        solver=_parse_solver(data.get("solver", {})),
        seed=int(data.get("solver", {}).get("seed", 0)),
        description=str(data.get("description", "")),
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return parse_scenario(data)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Inverse of :func:`parse_scenario`; floats round-trip exactly."""
    data: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "nTx": config.n_tx,
        "nRx": config.n_rx,
        "symbols": config.t_symbols,
        "noisePower": config.sigma2,
        "powerBudget": config.power_budget,
        "sinrTargetsDb": config.sinr_targets_db.tolist(),
    }
    if config.description:
        data["description"] = config.description
    if config.channel.kind == "los":
        data["channel"] = {
            "type": "los",
            "anglesDeg": config.channel.angles_deg.tolist(),
            "gains": config.channel.gains.tolist(),
        }
    else:
        data["channel"] = {
            "type": "explicit",
            "re": np.real(config.channel.matrix).tolist(),
            "im": np.imag(config.channel.matrix).tolist(),
        }
    data["sensing"] = {
        "priorMeanDeg": config.sensing.prior_mean_deg,
        "pathGain": [config.sensing.path_gain.real, config.sensing.path_gain.imag],
        "priorStdDeg": config.sensing.prior_std_deg,
        "quadratureOrder": config.sensing.quadrature_order,
    }
    data["solver"] = {
        "gapTol": config.solver.gap_tol,
        "maxIterations": config.solver.max_iterations,
        "betaMode": config.solver.beta_mode,
        "uplinkTol": config.solver.uplink_tol,
        "uplinkMaxIterations": config.solver.uplink_max_iterations,
        "seed": config.seed,
    }
    return data


def save_scenario(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(config), indent=2) + "\n")
