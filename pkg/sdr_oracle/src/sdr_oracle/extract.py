"""Beamformer extraction from lifted covariances.

Near-rank-one covariances project onto their principal component; otherwise
Gaussian randomization draws candidate directions, rescales each through the
downlink coupling system so every SINR constraint is met with equality, and
keeps the feasible candidate with the best bound value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import OracleScenario
from .sdp import SdrSolution, fim_of_gram, trace_inverse

RANK_ONE_RATIO = 1e-6
RANDOMIZATION_SAMPLES = 1000


class RandomizationFailed(Exception):
    """No randomized candidate satisfied the constraints."""


@dataclass
class ExtractionResult:
    v: np.ndarray
    bcrb: float
    used_randomization: bool


def downlink_sinr(v: np.ndarray, h: np.ndarray, sigma2: float) -> np.ndarray:
    gains = np.abs(h.conj().T @ v) ** 2
    desired = np.diagonal(gains)
    return desired / (gains.sum(axis=1) - desired + sigma2)


def _powers_for_directions(u: np.ndarray, scenario: OracleScenario) -> np.ndarray | None:
    """SINR-equality powers for unit directions, or None when infeasible."""
    gains = np.abs(scenario.h.conj().T @ u) ** 2
    d = np.diagonal(gains) / scenario.gammas
    f = gains.copy()
    np.fill_diagonal(f, 0.0)
    coupling = np.diag(d) - f
    try:
        p = np.linalg.solve(coupling, np.full(scenario.n_users, scenario.sigma2))
    except np.linalg.LinAlgError:
        return None
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        return None
    return p


def extract_beamformers(
    solution: SdrSolution, scenario: OracleScenario, seed: int = 0
) -> ExtractionResult:
    """Rank-one projection when the lifting is tight, randomization otherwise."""
    rank_one = bool(np.all(solution.rank_ratios < RANK_ONE_RATIO))
    if rank_one:
        cols = []
        for r in solution.covariances:
            _, eigvecs = np.linalg.eigh(r)
            cols.append(eigvecs[:, -1] * np.sqrt(max(float(np.real(np.trace(r))), 0.0)))
        v = np.stack(cols, axis=1)
        j = fim_of_gram(scenario, v @ v.conj().T)
        return ExtractionResult(v=v, bcrb=trace_inverse(j), used_randomization=False)

    rng = np.random.default_rng(seed)
    roots = []
    for r in solution.covariances:
        eigvals, eigvecs = np.linalg.eigh(r)
        roots.append(eigvecs @ np.diag(np.sqrt(np.clip(eigvals, 0.0, None))))
    best = None
    for _ in range(RANDOMIZATION_SAMPLES):
        u = np.stack(
            [
                root @ (rng.standard_normal(scenario.n_tx) + 1j * rng.standard_normal(scenario.n_tx))
                for root in roots
            ],
            axis=1,
        )
        norms = np.linalg.norm(u, axis=0)
        if np.any(norms == 0.0):
            continue
        u = u / norms
        p = _powers_for_directions(u, scenario)
        if p is None:
            continue
        power = float(p.sum())
        if power > scenario.power_budget * (1.0 + 1e-9):
            continue
        v = u * np.sqrt(p * (scenario.power_budget / power))
        value = trace_inverse(fim_of_gram(scenario, v @ v.conj().T))
        if best is None or value < best.bcrb:
            best = ExtractionResult(v=v, bcrb=value, used_randomization=True)
    if best is None:
        raise RandomizationFailed(
            f"no feasible candidate in {RANDOMIZATION_SAMPLES} draws"
        )
    return best
