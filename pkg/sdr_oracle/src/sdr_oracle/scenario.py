"""Independent reader for the shared scenario JSON schema.

Deliberately re-implements channel materialization and the prior-averaged
statistics instead of importing the solver package: the oracle should agree
with the primary through the numbers, not through shared code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class OracleScenario:
    n_tx: int
    n_rx: int
    t_symbols: int
    sigma2: float
    power_budget: float
    gammas: np.ndarray        # linear SINR targets
    h: np.ndarray             # (n_tx, K)
    t_grid: np.ndarray        # (L, L, n_tx, n_tx)
    c: np.ndarray             # (L, L)

    @property
    def n_users(self) -> int:
        return self.h.shape[1]

    @property
    def l_dim(self) -> int:
        return self.t_grid.shape[0]


def steering(m: int, theta_rad: float) -> np.ndarray:
    n = np.arange(m)
    return np.exp(1j * np.pi * n * np.sin(theta_rad))


def steering_rate(m: int, theta_rad: float) -> np.ndarray:
    n = np.arange(m)
    return 1j * np.pi * n * np.cos(theta_rad) * np.exp(1j * np.pi * n * np.sin(theta_rad))


def _aoa_statistics(sensing: dict, n_tx: int, n_rx: int) -> tuple[np.ndarray, np.ndarray]:
    mean = np.deg2rad(float(sensing.get("priorMeanDeg", 0.0)))
    std = np.deg2rad(float(sensing["priorStdDeg"]))
    order = int(sensing.get("quadratureOrder", 80))
    gain_re, gain_im = sensing.get("pathGain", [1.0, 0.0])
    alpha = complex(gain_re, gain_im)
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    acc = np.zeros((n_tx, n_tx), dtype=complex)
    for x, w in zip(nodes, weights):
        theta = mean + np.sqrt(2.0) * std * x
        a_t, da_t = steering(n_tx, theta), steering_rate(n_tx, theta)
        a_r, da_r = steering(n_rx, theta), steering_rate(n_rx, theta)
        gdot = alpha * (np.outer(da_r, a_t.conj()) + np.outer(a_r, da_t.conj()))
        acc += w * (gdot.conj().T @ gdot)
    t00 = acc / np.sqrt(np.pi)
    t00 = (t00 + t00.conj().T) / 2.0
    c = np.array([[1.0 / std**2]])
    return t00[np.newaxis, np.newaxis], c


def load_oracle_scenario(path: str | Path) -> OracleScenario:
    data = json.loads(Path(path).read_text())
    if data.get("schemaVersion") != 1:
        raise ValueError(f"unsupported schemaVersion {data.get('schemaVersion')!r}")
    n_tx, n_rx = int(data["nTx"]), int(data["nRx"])
    targets_db = np.asarray(data["sinrTargetsDb"], dtype=float)
    channel = data["channel"]
    if channel["type"] == "los":
        gains = np.asarray(channel.get("gains", np.ones(targets_db.size)), dtype=float)
        h = np.stack(
            [
                np.sqrt(g) * steering(n_tx, np.deg2rad(a))
                for a, g in zip(channel["anglesDeg"], gains)
            ],
            axis=1,
        )
    elif channel["type"] == "explicit":
        h = np.asarray(channel["re"], dtype=float) + 1j * np.asarray(channel["im"], dtype=float)
    else:
        raise ValueError(f"unknown channel type {channel['type']!r}")
    t_grid, c = _aoa_statistics(data["sensing"], n_tx, n_rx)
    return OracleScenario(
        n_tx=n_tx,
        n_rx=n_rx,
        t_symbols=int(data.get("symbols", 1)),
        sigma2=float(data["noisePower"]),
        power_budget=float(data["powerBudget"]),
        gammas=10.0 ** (targets_db / 10.0),
        h=h,
        t_grid=t_grid,
        c=c,
    )
