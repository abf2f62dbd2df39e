"""Bayesian Fisher information assembly and the quadratic forms built on it.

Conventions used throughout: ``v`` is the complex (N_T, K) matrix of downlink
beamformers, ``beta`` is a real (L, L) matrix whose column ``l`` is the
auxiliary vector paired with parameter ``l``, and ``stats`` supplies the
derivative-correlation grid ``T`` and prior matrix ``C``.

The central identities, all exercised by the test suite:

* J_ij    = (2*T_sym/sigma2) * Re(Tr(T[i][j] V V^H)) + C_ij
* Q_beta  = (2*T_sym/sigma2) * sum_l sum_ij beta[i,l] beta[j,l] T[i][j]
* Tr(Q_beta V V^H) = sum_l beta_l^T (J_V - C) beta_l
* max over beta of sum_l (2 beta_l^T e_l - beta_l^T J beta_l) = Tr(J^{-1}),
  attained at beta = J^{-1}.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, SingularFIM
from .sensing import SensingStatistics

# FIM inverses are refused beyond this condition number.
CONDITION_LIMIT = 1e12


def total_power(v: np.ndarray) -> float:
    """Tr(V V^H), the transmit power of a beamforming matrix."""
    return float(np.sum(np.abs(v) ** 2))


def _check_dims(stats: SensingStatistics, v: np.ndarray) -> None:
    if v.ndim != 2 or v.shape[0] != stats.n_tx:
        raise DimensionMismatch(
            f"beamformer must be ({stats.n_tx}, K), got {v.shape}"
        )


def bfim(stats: SensingStatistics, v: np.ndarray, t_symbols: int, sigma2: float) -> np.ndarray:
    """Bayesian Fisher information matrix of the beamformer ``v``.

    Returns the real symmetric (L, L) matrix.  The imaginary residue of the
    diagonal traces is asserted small instead of silently dropped, so a
    malformed statistics grid fails loudly here.
    """
    _check_dims(stats, v)
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if t_symbols < 1:
        raise ValueError("t_symbols must be at least 1")
    gram = v @ v.conj().T
    traces = np.einsum("ijab,ba->ij", stats.t, gram)
    scale = max(np.abs(traces).max(), 1.0)
    imag_res = np.abs(np.imag(np.diagonal(traces))).max()
    if imag_res > 1e-10 * scale:
        raise ValueError(f"diagonal trace has imaginary residue {imag_res:.3e}")
    j = (2.0 * t_symbols / sigma2) * np.real(traces) + stats.c
    asym = np.abs(j - j.T).max()
    if asym > 1e-10 * max(np.abs(j).max(), 1.0):
        raise ValueError(f"assembled FIM asymmetric by {asym:.3e}")
    return (j + j.T) / 2.0


def _spd_factor(j: np.ndarray):
    """Cholesky factor of a FIM with a condition-number guard."""
    j = np.asarray(j, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise DimensionMismatch(f"FIM must be square, got {j.shape}")
    eigs = np.linalg.eigvalsh((j + j.T) / 2.0)
    if eigs[0] <= eigs[-1] / CONDITION_LIMIT:
        raise SingularFIM(
            f"FIM eigenvalues span [{eigs[0]:.3e}, {eigs[-1]:.3e}]"
        )
    return scipy.linalg.cho_factor((j + j.T) / 2.0, lower=True)


def bcrb(j: np.ndarray) -> float:
    """Tr(J^{-1}) computed through a symmetric positive-definite solve."""
    factor = _spd_factor(j)
    inv = scipy.linalg.cho_solve(factor, np.eye(j.shape[0]))
    return float(np.trace(inv))


def beta_optimal(j: np.ndarray) -> np.ndarray:
    """The maximizing auxiliary matrix J^{-1} (column l equals J^{-1} e_l)."""
    factor = _spd_factor(j)
    return scipy.linalg.cho_solve(factor, np.eye(j.shape[0]))


def qbeta(
    stats: SensingStatistics, beta: np.ndarray, t_symbols: int, sigma2: float
) -> np.ndarray:
    """Sensing-power matrix of the auxiliary variables, Hermitian PSD (N_T, N_T).

    Q = (2*T_sym/sigma2) * sum_l sum_ij beta[i,l] beta[j,l] T[i][j].
    """
    beta = np.asarray(beta, dtype=float)
    l = stats.l_dim
    if beta.shape != (l, l):
        raise DimensionMismatch(f"beta must be ({l}, {l}), got {beta.shape}")
    q = (2.0 * t_symbols / sigma2) * np.einsum(
        "il,jl,ijab->ab", beta, beta, stats.t, optimize=True
    )
    q = (q + q.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(q)
    if eigs.size and eigs[0] < -1e-10 * max(eigs[-1], 0.0) - 1e-12:
        raise ValueError(f"sensing-power matrix has eigenvalue {eigs[0]:.3e}")
    return q


def inner_objective(
    stats: SensingStatistics,
    beta: np.ndarray,
    v: np.ndarray,
    t_symbols: int,
    sigma2: float,
) -> float:
    """sum_l (2 beta[l,l] - beta_l^T J_V beta_l), the saddle objective at fixed V."""
    j = bfim(stats, v, t_symbols, sigma2)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != j.shape:
        raise DimensionMismatch(f"beta must be {j.shape}, got {beta.shape}")
    return float(2.0 * np.trace(beta) - np.einsum("il,ij,jl->", beta, j, beta))


def beta_constant_term(stats: SensingStatistics, beta: np.ndarray) -> float:
    """sum_l (2 beta[l,l] - beta_l^T C beta_l), the V-independent part of the split form."""
    beta = np.asarray(beta, dtype=float)
    return float(2.0 * np.trace(beta) - np.einsum("il,ij,jl->", beta, stats.c, beta))
