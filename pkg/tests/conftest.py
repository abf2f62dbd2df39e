"""Shared generators for randomized tests.

Synthetic statistics are built in Gram form (sample channel derivatives,
average their cross products), which satisfies the pair-Hermitian and
contraction-PSD invariants by construction while exercising L > 1 paths the
angle model cannot reach.
"""

from pathlib import Path

import numpy as np
import pytest

import isacbeam as ib

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def gram_stats(rng, l_dim, n_tx, n_rx=None, draws=6):
    n_rx = n_rx or n_tx
    gd = rng.standard_normal((draws, l_dim, n_rx, n_tx)) + 1j * rng.standard_normal(
        (draws, l_dim, n_rx, n_tx)
    )
    t = np.einsum("siab,sjac->ijbc", gd.conj(), gd) / draws
    root = rng.standard_normal((l_dim, l_dim))
    c = root @ root.T + 0.5 * np.eye(l_dim)
    return ib.SensingStatistics(t=t, c=c)


def random_channels(rng, n_tx, n_users):
    return (rng.standard_normal((n_tx, n_users)) + 1j * rng.standard_normal((n_tx, n_users))) / np.sqrt(2)


def random_beamformer(rng, n_tx, n_users, power=None):
    v = rng.standard_normal((n_tx, n_users)) + 1j * rng.standard_normal((n_tx, n_users))
    if power is not None:
        v *= np.sqrt(power / np.sum(np.abs(v) ** 2))
    return v


def random_scenario(rng, n_tx=4, n_users=2, l_dim=1, margin=0.3):
    """Feasible random instance: targets chosen so the comm problem fits the budget."""
    h = random_channels(rng, n_tx, n_users)
    sigma2 = float(rng.uniform(0.05, 0.5))
    gammas = 10 ** rng.uniform(0.0, 1.0, size=n_users)
    stats = gram_stats(rng, l_dim, n_tx)
    scenario = ib.Scenario(
        h=h,
        gammas=gammas,
        sigma2=sigma2,
        power_budget=1.0,
        t_symbols=int(rng.integers(1, 5)),
        stats=stats,
    )
    feas = ib.check_feasibility(scenario)
    if not feas.converged:
        return random_scenario(rng, n_tx, n_users, l_dim, margin)
    budget = feas.min_power / margin
    return ib.Scenario(
        h=h,
        gammas=gammas,
        sigma2=sigma2,
        power_budget=budget,
        t_symbols=scenario.t_symbols,
        stats=stats,
    )


def two_user_scenario(prior_std_deg, n_tx=20, gammas_db=(10.0, 12.0)):
    model = ib.AoAModel(
        n_tx=n_tx, n_rx=n_tx, prior_mean_deg=0.0, prior_std_deg=prior_std_deg
    )
    stats = ib.compute_statistics(model)
    h = np.stack(
        [ib.steering_vector(n_tx, np.deg2rad(a)) for a in (-30.0, 50.0)], axis=1
    )
    return ib.Scenario(
        h=h,
        gammas=10 ** (np.asarray(gammas_db) / 10.0),
        sigma2=0.1,
        power_budget=1.0,
        t_symbols=1,
        stats=stats,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)
