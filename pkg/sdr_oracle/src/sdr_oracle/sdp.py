"""Semidefinite relaxation of the bound-minimization beamforming problem.

Lifts each beamformer to a Hermitian PSD covariance R_k, expresses the
trace-of-inverse objective through one Schur-complement block per parameter,
and minimizes sum(d_l) subject to the per-user SINR constraints and the
power budget.  The information matrix is affine in sum(R_k), so the whole
program is convex.

The information matrix can be poorly scaled against the auxiliaries d_l
(their product is order one); both are rebalanced by a congruence before the
solve so interior-point tolerances act on well-conditioned blocks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from .scenario import OracleScenario


class SolverFailed(Exception):
    """The convex solver did not return an optimal point."""


@dataclass
class SdrSolution:
    covariances: list[np.ndarray]
    d: np.ndarray
    objective: float
    rank_ratios: np.ndarray  # second-to-first eigenvalue ratio per user
    solver_status: str
    solver_name: str
    wall_time_sec: float


def _fim_scale(scenario: OracleScenario) -> float:
    """Order-of-magnitude of the information matrix at full power."""
    top = float(np.linalg.eigvalsh(scenario.t_grid[0, 0])[-1])
    coeff = 2.0 * scenario.t_symbols / scenario.sigma2
    return coeff * scenario.power_budget * top + float(np.abs(scenario.c).max()) + 1.0


def solve_sdr(scenario: OracleScenario, solver: str | None = None) -> SdrSolution:
    """Solve the relaxation; returns covariances, auxiliaries and the bound value.

    CVXOPT reaches clean optimality certificates on these instances; CLARABEL
    is the fallback (its values match to eight digits even when it reports
    reduced accuracy).
    """
    n, k, l_dim = scenario.n_tx, scenario.n_users, scenario.l_dim
    covs = [cp.Variable((n, n), hermitian=True) for _ in range(k)]
    d = cp.Variable(l_dim)
    r_sum = sum(covs)
    scale = _fim_scale(scenario)
    coeff = 2.0 * scenario.t_symbols / scenario.sigma2

    j_rows = []
    for i in range(l_dim):
        row = []
        for jj in range(l_dim):
            expr = coeff * cp.real(cp.trace(scenario.t_grid[i, jj] @ r_sum)) + scenario.c[i, jj]
            row.append(cp.reshape(expr / scale, (1, 1), order="C"))
        j_rows.append(row)

    constraints = []
    for idx in range(k):
        constraints.append(covs[idx] >> 0)
        h_k = scenario.h[:, idx]
        own = cp.real(cp.quad_form(h_k, covs[idx]))
        interference = sum(
            cp.real(cp.quad_form(h_k, covs[i])) for i in range(k) if i != idx
        )
        constraints.append(own / scenario.gammas[idx] - interference >= scenario.sigma2)
    constraints.append(cp.real(cp.trace(r_sum)) <= scenario.power_budget)

    # Schur blocks after the congruence diag(1/sqrt(scale), sqrt(scale)):
    # [[J/scale, e], [e^T, scale*d]] >= 0  <=>  [[J, e], [e^T, d]] >= 0
    for l in range(l_dim):
        e = np.zeros((l_dim, 1))
        e[l, 0] = 1.0
        block = cp.bmat(
            [
                [cp.bmat(j_rows), e],
                [e.T, cp.reshape(scale * d[l], (1, 1), order="C")],
            ]
        )
        constraints.append(block >> 0)

    problem = cp.Problem(cp.Minimize(cp.sum(d)), constraints)
    chain = [solver] if solver else ["CVXOPT", "CLARABEL"]
    start = time.perf_counter()
    used = None
    for name in chain:
        try:
            problem.solve(solver=name)
        except cp.error.SolverError:
            continue
        if problem.status in ("optimal", "optimal_inaccurate"):
            used = name
            break
    wall = time.perf_counter() - start
    if used is None:
        raise SolverFailed(f"no solver in {chain} returned an optimum ({problem.status!r})")
    solver = used

    covariances = []
    ratios = np.zeros(k)
    for idx in range(k):
        r = np.asarray(covs[idx].value)
        r = (r + r.conj().T) / 2.0
        covariances.append(r)
        eigs = np.linalg.eigvalsh(r)
        ratios[idx] = max(eigs[-2], 0.0) / max(eigs[-1], 1e-300) if n > 1 else 0.0
    return SdrSolution(
        covariances=covariances,
        d=np.asarray(d.value, dtype=float).reshape(-1),
        objective=float(problem.value),
        rank_ratios=ratios,
        solver_status=problem.status,
        solver_name=solver,
        wall_time_sec=wall,
    )


def fim_of_gram(scenario: OracleScenario, gram: np.ndarray) -> np.ndarray:
    """Information matrix of a transmit covariance (sum of the lifted R_k)."""
    coeff = 2.0 * scenario.t_symbols / scenario.sigma2
    j = np.empty((scenario.l_dim, scenario.l_dim))
    for i in range(scenario.l_dim):
        for jj in range(scenario.l_dim):
            j[i, jj] = coeff * float(np.real(np.trace(scenario.t_grid[i, jj] @ gram))) + scenario.c[i, jj]
    return (j + j.T) / 2.0


def trace_inverse(j: np.ndarray) -> float:
    return float(np.trace(np.linalg.inv(j)))
