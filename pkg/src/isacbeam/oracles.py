"""Independent ground-truth generators used by the test suite.

Nothing here shares code paths with the duality solver: the single-user
closed form is analytic, the tiny-instance search is multistart plus
coordinate descent in the raw beamformer entries, and the dual derivative
check is a central finite difference of the dual function itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fim, uplink
from .errors import NoFeasiblePoint, PerturbationInadmissible, ZeroChannel
from .problem import Scenario, downlink_sinr
from .solver import SolverOptions, _solve_subproblem, dual_value
from .uplink import SubproblemStatus


@dataclass(frozen=True)
class TinyInstance:
    """A brute-forceable problem: at most 3 antennas, 2 users, one parameter."""

    scenario: Scenario
    search_budget: int = 200

    def __post_init__(self):
        if self.scenario.n_tx > 3 or self.scenario.n_users > 2:
            raise ValueError("instance too large for brute force")
        if self.scenario.stats.l_dim != 1:
            raise ValueError("brute force supports a single parameter only")


def analytic_single_user_power(
    h: np.ndarray, gamma: float, sigma2: float
) -> tuple[float, np.ndarray]:
    """Closed-form minimum power and beamformer for one user: match the channel."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    norm2 = float(np.sum(np.abs(h) ** 2))
    if norm2 == 0.0:
        raise ZeroChannel("channel vector is zero")
    power = gamma * sigma2 / norm2
    v = np.sqrt(gamma * sigma2) * h / norm2
    return power, v


def _sinr_violation(scenario: Scenario, v: np.ndarray) -> float:
    sinr = downlink_sinr(v, scenario.h, scenario.sigma2)
    return float(np.max((scenario.gammas - sinr) / scenario.gammas))


def _penalized(scenario: Scenario, v: np.ndarray, mu: float) -> float:
    power = fim.total_power(v)
    if power > scenario.power_budget:
        v = v * np.sqrt(scenario.power_budget / power)
    j = fim.bfim(scenario.stats, v, scenario.t_symbols, scenario.sigma2)
    violation = max(0.0, _sinr_violation(scenario, v))
    return fim.bcrb(j) + mu * violation


def _refine(scenario: Scenario, v0: np.ndarray, mu: float, sweeps: int = 6) -> np.ndarray:
    """Coordinate descent on the real and imaginary parts with ball projection."""
    v = v0.copy()
    best = _penalized(scenario, v, mu)
    scale = np.sqrt(scenario.power_budget / v.size)
    for delta in scale * np.array([0.3, 0.1, 0.03, 0.01, 0.003]):
        for _ in range(sweeps):
            improved = False
            for idx in np.ndindex(v.shape):
                for direction in (delta, -delta, 1j * delta, -1j * delta):
                    trial = v.copy()
                    trial[idx] += direction
                    power = fim.total_power(trial)
                    if power > scenario.power_budget:
                        trial *= np.sqrt(scenario.power_budget / power)
                    value = _penalized(scenario, trial, mu)
                    if value < best - 1e-14:
                        v, best = trial, value
                        improved = True
            if not improved:
                break
    return v


def brute_force_isac(inst: TinyInstance, seed: int = 0) -> tuple[float, np.ndarray]:
    """Upper-bound oracle: multistart on the power sphere plus local refinement.

    Returns the best SINR-feasible point found; the duality solver must do at
    least as well up to one percent.
    """
    scenario = inst.scenario
    rng = np.random.default_rng(seed)
    shape = (scenario.n_tx, scenario.n_users)
    mu = 1e3 * fim.bcrb(
        fim.bfim(scenario.stats, np.zeros(shape, dtype=complex) + 0.0, scenario.t_symbols, scenario.sigma2)
    )

    best_value = np.inf
    best_v = None

    def consider(v: np.ndarray) -> None:
        nonlocal best_value, best_v
        if _sinr_violation(scenario, v) > 1e-9:
            return
        if fim.total_power(v) > scenario.power_budget * (1.0 + 1e-9):
            return
        value = fim.bcrb(fim.bfim(scenario.stats, v, scenario.t_symbols, scenario.sigma2))
        if value < best_value:
            best_value, best_v = value, v.copy()

    for _ in range(inst.search_budget):
        v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        v *= np.sqrt(scenario.power_budget / fim.total_power(v))
        if _sinr_violation(scenario, v) > 0.0:
            continue
        consider(v)
        refined = _refine(scenario, v, mu)
        consider(refined)

    if best_v is None:
        raise NoFeasiblePoint(
            f"no SINR-feasible draw in {inst.search_budget} attempts"
        )
    refined = _refine(scenario, best_v, mu)
    consider(refined)
    return best_value, best_v


def dual_finite_difference(
    scenario: Scenario,
    lam: float,
    beta: np.ndarray,
    direction: tuple[float, np.ndarray],
    h_step: float = 1e-5,
    options: SolverOptions | None = None,
) -> float:
    """Central finite difference of the dual function along a multiplier direction."""
    options = options or SolverOptions()
    d_lam, d_beta = direction
    values = []
    for sign in (+1.0, -1.0):
        lam_p = lam + sign * h_step * d_lam
        beta_p = beta + sign * h_step * d_beta
        if lam_p < 0:
            raise PerturbationInadmissible("lambda perturbed below zero")
        sub = _solve_subproblem(scenario, lam_p, beta_p, options)
        if sub.status is not SubproblemStatus.CONVERGED:
            raise PerturbationInadmissible(f"probe point status {sub.status.value}")
        values.append(dual_value(scenario, lam_p, beta_p, sub))
    return (values[0] - values[1]) / (2.0 * h_step)
