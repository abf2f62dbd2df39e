"""Runtime problem instance shared by the solver and the oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .sensing import SensingStatistics


@dataclass(frozen=True)
class Scenario:
    """A fully materialized problem instance.

    ``h`` holds one user channel per column, shape (N_T, K); ``gammas`` are
    the linear SINR targets.  Sensing enters through ``stats`` only.
    """

    h: np.ndarray
    gammas: np.ndarray
    sigma2: float
    power_budget: float
    t_symbols: int
    stats: SensingStatistics

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        gammas = np.asarray(self.gammas, dtype=float)
        if h.ndim != 2:
            raise DimensionMismatch(f"channel matrix must be 2-D, got {h.shape}")
        if gammas.ndim != 1 or gammas.shape[0] != h.shape[1]:
            raise DimensionMismatch(
                f"need one SINR target per user, got {gammas.shape} for {h.shape[1]} users"
            )
        if h.shape[0] != self.stats.n_tx:
            raise DimensionMismatch(
                f"channel rows {h.shape[0]} != statistics dimension {self.stats.n_tx}"
            )
        if np.any(gammas <= 0):
            raise ValueError("SINR targets must be positive")
        if self.sigma2 <= 0 or self.power_budget <= 0 or self.t_symbols < 1:
            raise ValueError("sigma2, power_budget and t_symbols must be positive")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "gammas", gammas)

    @property
    def n_tx(self) -> int:
        return self.h.shape[0]

    @property
    def n_users(self) -> int:
        return self.h.shape[1]


def downlink_sinr(v: np.ndarray, h: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-user downlink SINR of beamformers ``v`` over channels ``h``."""
    gains = np.abs(h.conj().T @ v) ** 2  # gains[k, i] = |h_k^H v_i|^2
    desired = np.diagonal(gains)
    interference = gains.sum(axis=1) - desired
    return desired / (interference + sigma2)
