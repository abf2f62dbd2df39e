"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete.  Criteria 1-10 exercise the primary solver only; the SDR
cross-checks live in the separate oracle package.
"""

import functools
import json
import time

import numpy as np
import pytest

import isacbeam as ib
from isacbeam import beampattern, fim, uplink
from isacbeam.artifacts import read_sweep, run_solve, run_sweep
from isacbeam.oracles import TinyInstance, analytic_single_user_power, brute_force_isac
from isacbeam.scenario import load_scenario
from isacbeam.solver import SolverOptions

from conftest import SCENARIO_DIR, gram_stats, random_beamformer, random_channels
from test_oracles import tiny_instance


def criterion(number, label, budget_sec):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"FAIL criterion {number}: {label}")
                raise
            elapsed = time.perf_counter() - start
            print(f"PASS criterion {number}: {label} ({elapsed:.1f} s)")
            assert elapsed < budget_sec, f"runtime {elapsed:.1f}s over {budget_sec}s budget"
        return wrapper
    return decorate


@criterion(1, "inner objective peaks at the closed-form maximizer", 5.0)
def test_criterion_1_beta_identity():
    rng = np.random.default_rng(101)
    for _ in range(100):
        l_dim = int(rng.integers(1, 4))
        n_tx = int(rng.integers(2, 7))
        stats = gram_stats(rng, l_dim, n_tx)
        v = random_beamformer(rng, n_tx, int(rng.integers(1, 4)))
        t_sym = int(rng.integers(1, 5))
        sigma2 = float(rng.uniform(0.1, 2.0))
        j = ib.bfim(stats, v, t_sym, sigma2)
        target = ib.bcrb(j)
        best = ib.beta_optimal(j)
        at_best = ib.inner_objective(stats, best, v, t_sym, sigma2)
        assert abs(at_best - target) <= 1e-9 * target
        for _ in range(5):
            other = best + 0.02 * rng.standard_normal(best.shape) * np.abs(best).max()
            assert ib.inner_objective(stats, other, v, t_sym, sigma2) < at_best


@criterion(2, "sensing-power trace identity", 5.0)
def test_criterion_2_qbeta_trace_identity():
    rng = np.random.default_rng(202)
    for _ in range(100):
        l_dim = int(rng.integers(1, 4))
        n_tx = int(rng.integers(2, 7))
        stats = gram_stats(rng, l_dim, n_tx)
        beta = rng.standard_normal((l_dim, l_dim))
        v = random_beamformer(rng, n_tx, int(rng.integers(1, 4)))
        t_sym = int(rng.integers(1, 5))
        sigma2 = float(rng.uniform(0.1, 2.0))
        q = ib.qbeta(stats, beta, t_sym, sigma2)
        lhs = float(np.real(np.trace(q @ (v @ v.conj().T))))
        j = ib.bfim(stats, v, t_sym, sigma2)
        rhs = float(np.einsum("il,ij,jl->", beta, j - stats.c, beta))
        assert abs(lhs - rhs) <= 1e-9 * max(abs(rhs), 1e-12)


def _admissible_instances(seed, count):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n_tx = int(rng.integers(3, 9))
        n_users = int(rng.integers(1, 4))
        h = random_channels(rng, n_tx, n_users)
        gammas = 10 ** rng.uniform(-0.3, 0.9, size=n_users)
        sigma2 = float(rng.uniform(0.1, 1.0))
        root = rng.standard_normal((n_tx, n_tx)) + 1j * rng.standard_normal((n_tx, n_tx))
        q = root @ root.conj().T / n_tx
        lam = float(np.linalg.eigvalsh(q)[-1]) * (1.0 + rng.uniform(0.02, 0.5))
        out.append((lam, q, h, gammas, sigma2))
    return out


@criterion(3, "uplink-downlink duality on 50 admissible pairs", 30.0)
def test_criterion_3_duality_suite():
    for lam, q, h, gammas, sigma2 in _admissible_instances(303, 50):
        res = ib.solve_uplink(lam, q, h, gammas)
        assert res.status is ib.SubproblemStatus.CONVERGED
        sub = ib.recover_downlink(res, lam, q, h, gammas, sigma2)
        sinr = ib.downlink_sinr(sub.v, h, sigma2)
        assert np.abs(sinr - gammas).max() <= 1e-6 * gammas.min()
        uplink_value = sigma2 * float(res.z.sum())
        assert abs(sub.objective - uplink_value) <= 1e-6 * abs(uplink_value)


@criterion(4, "monotone power iterates and initializer independence", 30.0)
def test_criterion_4_monotone_convergence():
    for lam, q, h, gammas, _ in _admissible_instances(303, 50):
        res = ib.solve_uplink(lam, q, h, gammas)
        assert res.status is ib.SubproblemStatus.CONVERGED
        hist = res.z_history
        assert np.all(hist[2:] <= hist[1:-1] * (1 + 1e-12))
        z_prev = hist[-2]
        residual = np.abs(hist[-1] - z_prev).max() / max(1.0, np.abs(z_prev).max())
        assert residual < 1e-10
        z0 = uplink.default_initial_power(lam, q, h, gammas)
        res_big = ib.solve_uplink(lam, q, h, gammas, z0=1e3 * z0)
        assert np.abs(res_big.z - res.z).max() <= 1e-8 * max(np.abs(res.z).max(), 1.0)


@criterion(5, "single-user feasibility matches the analytic closed form", 1.0)
def test_criterion_5_single_user_power():
    rng = np.random.default_rng(505)
    for _ in range(100):
        n_tx = int(rng.integers(2, 10))
        h = random_channels(rng, n_tx, 1)
        gamma = float(10 ** rng.uniform(0.0, 1.2))
        sigma2 = float(rng.uniform(0.1, 1.0))
        stats = gram_stats(rng, 1, n_tx)
        scenario = ib.Scenario(
            h=h, gammas=np.array([gamma]), sigma2=sigma2,
            power_budget=1e9, t_symbols=1, stats=stats,
        )
        feas = ib.check_feasibility(scenario)
        expected, _ = analytic_single_user_power(h[:, 0], gamma, sigma2)
        assert abs(feas.min_power - expected) <= 1e-8 * expected


@criterion(6, "duality solver at least matches brute force on tiny instances", 120.0)
def test_criterion_6_tiny_instances():
    rng = np.random.default_rng(606)
    for index in range(20):
        inst = tiny_instance(rng, n_tx=2)
        oracle_value, _ = brute_force_isac(inst, seed=index)
        report = ib.solve(inst.scenario)
        assert report.bcrb <= oracle_value * 1.01
        assert oracle_value >= report.bcrb - 1e-9


@criterion(7, "full-size two-user scenario closes the duality gap", 120.0)
def test_criterion_7_end_to_end_gap(tmp_path):
    for name in ("fig2_sigma2p5.json", "fig2_sigma10.json"):
        start = time.perf_counter()
        config = load_scenario(SCENARIO_DIR / name)
        result = run_solve(config, tmp_path / name.replace(".json", "")).result
        elapsed = time.perf_counter() - start
        assert result["status"] == "converged"
        assert result["relativeGap"] <= 1e-3
        assert abs(result["totalPower"] - config.power_budget) <= 1e-4 * config.power_budget
        np.testing.assert_allclose(result["achievedSinrDb"], [10.0, 12.0], atol=1e-3)
        assert elapsed < 60.0
        trace = np.loadtxt(
            tmp_path / name.replace(".json", "") / "trace.csv", delimiter=",", skiprows=1, ndmin=2
        )
        assert trace[:, 6].max() < 30  # the halving cap never binds


@criterion(8, "beam patterns form the expected lobes", 120.0)
def test_criterion_8_pattern_structure(tmp_path):
    def pattern_of(name, comm_only=False):
        config = load_scenario(SCENARIO_DIR / name)
        out = tmp_path / (name.replace(".json", "") + ("_comm" if comm_only else ""))
        run_solve(config, out, comm_only=comm_only)
        rows = np.loadtxt(out / "beampattern.csv", delimiter=",", skiprows=1)
        return rows[:, 0], rows[:, 1]

    grid, gains = pattern_of("fig2_sigma2p5.json")
    for target in (-30.0, 0.0, 50.0):
        peak = beampattern.peak_near(grid, gains, target, window_deg=5.0)
        assert peak is not None and abs(peak - target) <= 2.0
    width_narrow = beampattern.lobe_width_db(grid, gains, 0.0)

    grid10, gains10 = pattern_of("fig2_sigma10.json")
    for target in (-30.0, 0.0, 50.0):
        peak = beampattern.peak_near(grid10, gains10, target, window_deg=5.0)
        assert peak is not None and abs(peak - target) <= 2.0
    width_wide = beampattern.lobe_width_db(grid10, gains10, 0.0)
    assert width_wide > width_narrow

    grid_c, gains_c = pattern_of("fig2_sigma2p5.json", comm_only=True)
    for target in (-30.0, 50.0):
        peak = beampattern.peak_near(grid_c, gains_c, target, window_deg=5.0)
        assert peak is not None and abs(peak - target) <= 2.0


@criterion(9, "bound responds monotonically to budget and targets", 300.0)
def test_criterion_9_monotone_sweeps(tmp_path):
    config = load_scenario(SCENARIO_DIR / "sweep_nt8.json")

    run_sweep(config, "power", [0.5, 1.0, 2.0, 4.0, 8.0], tmp_path / "power")
    rows = read_sweep(tmp_path / "power" / "sweep.csv")
    values = [r["bcrb"] for r in rows]
    assert all(r["status"] == "ok" for r in rows)
    for a, b in zip(values, values[1:]):
        assert b <= a * (1 + 1e-6)

    run_sweep(config, "sinrDb", [3.0, 6.0, 9.0, 12.0, 15.0], tmp_path / "sinr")
    rows = read_sweep(tmp_path / "sinr" / "sweep.csv")
    values = [r["bcrb"] for r in rows]
    assert all(r["status"] == "ok" for r in rows)
    for a, b in zip(values, values[1:]):
        assert b >= a * (1 - 1e-6)


@criterion(10, "both multiplier-update modes agree", 120.0)
def test_criterion_10_beta_mode_agreement():
    config = load_scenario(SCENARIO_DIR / "fig2_sigma2p5.json")
    scenario = config.build()
    rep_sub = ib.solve(scenario, SolverOptions(beta_mode="subgradient"))
    rep_cf = ib.solve(scenario, SolverOptions(beta_mode="closed-form"))
    assert abs(rep_sub.bcrb - rep_cf.bcrb) <= 5e-3 * min(rep_sub.bcrb, rep_cf.bcrb)
