"""Fixed-point solver for the virtual uplink problem and downlink recovery.

For a fixed multiplier pair the inner beamforming subproblem minimizes
sum_k v_k^H (lambda*I - Q) v_k subject to the downlink SINR constraints.  Its
solution is obtained in the virtual uplink domain by alternating maximum-SINR
combining (for fixed uplink powers) with a power-control update (for fixed
combiners), then mapping the converged combiners back to downlink beamformers
through the coupling system (D - F) p = sigma2 * 1.

Inadmissible multiplier pairs make the subproblem unbounded below; they are
detected either instantly (a combiner numerator matrix stops being positive
definite) or through the power sequence falling below zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    DualityCheckFailed,
    IndefiniteNumerator,
    SingularCoupling,
    ZeroDesiredGain,
)

UPLINK_TOL = 1e-10
UPLINK_MAX_ITERATIONS = 10_000
SINR_EQUALITY_TOL = 1e-8
POWER_ITERATIONS = 200
POWER_ITERATION_TOL = 1e-10
DOMINATION_FACTOR = 1e3
RESTART_FACTOR = 1e2
MAX_RESTARTS = 3


class SubproblemStatus(enum.Enum):
    CONVERGED = "converged"
    INADMISSIBLE = "inadmissible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class UplinkResult:
    """Outcome of the alternating combiner/power iteration."""

    status: SubproblemStatus
    u: np.ndarray | None
    z: np.ndarray | None
    iterations: int
    z_history: np.ndarray
    restarts: int = 0


@dataclass
class SubproblemResult:
    """Converged downlink solution recovered from the uplink fixed point."""

    status: SubproblemStatus
    v: np.ndarray | None = None
    u: np.ndarray | None = None
    z: np.ndarray | None = None
    p: np.ndarray | None = None
    objective: float = np.nan
    coupling_radius: float = np.nan
    uplink: UplinkResult | None = field(default=None, repr=False)


def effective_noise_matrix(lam: float, q: np.ndarray) -> tuple[np.ndarray, float]:
    """lambda*I - Q together with its minimum eigenvalue.

    A nonnegative minimum eigenvalue is the sufficient (global PSD)
    admissibility certificate for the pair that produced ``q``.
    """
    q = np.asarray(q)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise DimensionMismatch(f"Q must be square, got {q.shape}")
    a = lam * np.eye(q.shape[0]) - q
    min_eig = float(np.linalg.eigvalsh((a + a.conj().T) / 2.0)[0])
    return a, min_eig


def _combiner_from_factor(factor, h_k: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit-norm A_k^{-1} h_k with the largest-magnitude entry made real-positive."""
    u = scipy.linalg.cho_solve(factor, h_k)
    quad = float(np.real(h_k.conj() @ u))  # h_k^H A_k^{-1} h_k, real positive for PD A_k
    norm = np.linalg.norm(u)
    if norm == 0.0:
        raise ZeroDesiredGain("combiner solve returned the zero vector")
    u = u / norm
    pivot = u[np.argmax(np.abs(u))]
    u = u * (pivot.conj() / abs(pivot))
    return u, quad


def _numerator_factor(a_k: np.ndarray):
    """Cholesky factor of the combiner numerator, or IndefiniteNumerator."""
    a_k = (a_k + a_k.conj().T) / 2.0
    try:
        factor = scipy.linalg.cho_factor(a_k, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise IndefiniteNumerator(str(exc)) from exc
    diag = np.real(np.diagonal(factor[0]))
    scale = max(np.abs(a_k).max(), 1e-300)
    if (diag.min() ** 2) <= 1e-10 * scale:
        raise IndefiniteNumerator(
            f"numerator matrix nearly singular (pivot {diag.min():.3e})"
        )
    return factor


def max_sinr_combiner(
    k: int, z: np.ndarray, h: np.ndarray, a: np.ndarray, gamma_k: float
) -> tuple[np.ndarray, float]:
    """Minimizer of the combiner quotient for user k at uplink powers ``z``.

    Returns the unit-norm combiner and the attained quotient value
    gamma_k / (h_k^H A_k^{-1} h_k), which is also the fixed-point power.
    """
    n_users = h.shape[1]
    others = [i for i in range(n_users) if i != k]
    a_k = a + (h[:, others] * z[others]) @ h[:, others].conj().T
    factor = _numerator_factor(a_k)
    u, quad = _combiner_from_factor(factor, h[:, k])
    return u, gamma_k / quad


def power_update(
    u: np.ndarray, z: np.ndarray, h: np.ndarray, a: np.ndarray, gammas: np.ndarray
) -> np.ndarray:
    """One uplink power-control step for fixed combiners.

    z'_k = (sum_{i != k} z_i |h_i^H u_k|^2 + u_k^H A u_k) * gamma_k / |h_k^H u_k|^2
    """
    gains = np.abs(h.conj().T @ u) ** 2  # gains[i, k] = |h_i^H u_k|^2
    desired = np.diagonal(gains)
    if np.any(desired <= 0.0):
        raise ZeroDesiredGain("a combiner is orthogonal to its own channel")
    interference = np.einsum("i,ik->k", z, gains) - z * desired
    noise = np.real(np.einsum("ik,ij,jk->k", u.conj(), a, u))
    return (interference + noise) * gammas / desired


def coupling_matrices(
    u: np.ndarray, h: np.ndarray, gammas: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal D and zero-diagonal F of the downlink coupling system."""
    gains = np.abs(h.conj().T @ u) ** 2  # gains[i, j] = |h_i^H u_j|^2
    d = np.diagonal(gains) / gammas
    f = gains.copy()
    np.fill_diagonal(f, 0.0)
    return d, f


def spectral_radius_nonneg(
    m: np.ndarray,
    iterations: int = POWER_ITERATIONS,
    tol: float = POWER_ITERATION_TOL,
) -> float:
    """Spectral radius of an elementwise-nonnegative matrix by power iteration."""
    n = m.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    rho = 0.0
    for _ in range(iterations):
        y = m @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x_new = y / norm
        if abs(norm - rho) <= tol * max(1.0, rho):
            return float(norm)
        rho, x = norm, x_new
    return float(rho)


def default_initial_power(
    lam: float, q: np.ndarray, h: np.ndarray, gammas: np.ndarray
) -> np.ndarray:
    """Scale-aware dominating initializer for the power iteration."""
    q_norm = float(np.linalg.norm(q, 2)) if q.size else 0.0
    channel_power = np.sum(np.abs(h) ** 2, axis=0)
    return DOMINATION_FACTOR * gammas * (abs(lam) + q_norm + 1e-300) / channel_power


def uplink_sinr(
    u: np.ndarray, z: np.ndarray, h: np.ndarray, a: np.ndarray
) -> np.ndarray:
    """Per-user uplink SINR of combiners ``u`` at powers ``z``."""
    gains = np.abs(h.conj().T @ u) ** 2
    desired = z * np.diagonal(gains)
    interference = np.einsum("i,ik->k", z, gains) - desired
    noise = np.real(np.einsum("ik,ij,jk->k", u.conj(), a, u))
    return desired / (interference + noise)


def solve_uplink(
    lam: float,
    q: np.ndarray,
    h: np.ndarray,
    gammas: np.ndarray,
    z0: np.ndarray | None = None,
    tol: float = UPLINK_TOL,
    max_iterations: int = UPLINK_MAX_ITERATIONS,
) -> UplinkResult:
    """Alternate combining and power control until the power vector fixes.

    Starting above the fixed point the sequence decreases monotonically onto
    it; a component falling to zero or below, or an indefinite combiner
    numerator, certifies that the multiplier pair is inadmissible.  An
    iteration-limit exit whose tail is still climbing suggests the start did
    not dominate the fixed point, so the start is raised and the run repeated
    a bounded number of times.
    """
    a, _ = effective_noise_matrix(lam, q)
    z_start = default_initial_power(lam, q, h, gammas) if z0 is None else np.asarray(z0, dtype=float)
    restarts = 0
    while True:
        result = _solve_uplink_once(a, h, gammas, z_start, tol, max_iterations)
        result.restarts = restarts
        if result.status is not SubproblemStatus.ITERATION_LIMIT:
            return result
        hist = result.z_history
        climbing = hist.shape[0] >= 2 and np.any(hist[-1] > hist[-2] * (1.0 + tol))
        if not climbing or restarts >= MAX_RESTARTS:
            return result
        restarts += 1
        z_start = z_start * RESTART_FACTOR


def _solve_uplink_once(a, h, gammas, z0, tol, max_iterations) -> UplinkResult:
    n_users = h.shape[1]
    z = np.asarray(z0, dtype=float).copy()
    history = [z.copy()]
    u = np.zeros((h.shape[0], n_users), dtype=complex)
    for iteration in range(1, max_iterations + 1):
        try:
            for k in range(n_users):
                u[:, k], _ = max_sinr_combiner(k, z, h, a, gammas[k])
            z_new = power_update(u, z, h, a, gammas)
        except IndefiniteNumerator:
            return UplinkResult(
                status=SubproblemStatus.INADMISSIBLE,
                u=None,
                z=None,
                iterations=iteration,
                z_history=np.array(history),
            )
        history.append(z_new.copy())
        if np.any(z_new <= 0.0):
            return UplinkResult(
                status=SubproblemStatus.INADMISSIBLE,
                u=None,
                z=None,
                iterations=iteration,
                z_history=np.array(history),
            )
        residual = np.abs(z_new - z).max() / max(1.0, np.abs(z).max())
        z = z_new
        if residual <= tol:
            try:
                for k in range(n_users):
                    u[:, k], _ = max_sinr_combiner(k, z, h, a, gammas[k])
                z = _settle_powers(u, h, a, gammas, fallback=z)
            except IndefiniteNumerator:
                return UplinkResult(
                    status=SubproblemStatus.INADMISSIBLE,
                    u=None,
                    z=None,
                    iterations=iteration,
                    z_history=np.array(history),
                )
            result = UplinkResult(
                status=SubproblemStatus.CONVERGED,
                u=u.copy(),
                z=z,
                iterations=iteration,
                z_history=np.array(history),
            )
            _verify_uplink_fixed_point(result, a, h, gammas)
            return result
    return UplinkResult(
        status=SubproblemStatus.ITERATION_LIMIT,
        u=None,
        z=None,
        iterations=max_iterations,
        z_history=np.array(history),
    )


def _settle_powers(u, h, a, gammas, fallback) -> np.ndarray:
    """Exact SINR-equality powers for fixed combiners.

    The fixed point satisfies (D - F^T) z = s with s_k = u_k^H A u_k; solving
    that system once removes the residual left by the iterative stopping
    rule.  Falls back to the iterated powers if the direct solve misbehaves.
    """
    d, f = coupling_matrices(u, h, gammas)
    s = np.real(np.einsum("ik,ij,jk->k", u.conj(), a, u))
    try:
        z = np.linalg.solve(np.diag(d) - f.T, s)
    except np.linalg.LinAlgError:
        return fallback
    if np.any(~np.isfinite(z)) or np.any(z <= 0.0):
        return fallback
    if np.abs(z - fallback).max() > 1e-6 * max(1.0, np.abs(fallback).max()):
        return fallback
    return z


def _verify_uplink_fixed_point(result: UplinkResult, a, h, gammas) -> None:
    """Converged runs must meet the uplink SINRs with equality and couple stably."""
    sinr = uplink_sinr(result.u, result.z, h, a)
    rel = np.abs(sinr - gammas) / gammas
    if rel.max() > SINR_EQUALITY_TOL:
        raise DualityCheckFailed(
            f"uplink SINR off target by {rel.max():.3e} relative after convergence"
        )
    d, f = coupling_matrices(result.u, h, gammas)
    rho = spectral_radius_nonneg(f / d[:, None])
    if not rho < 1.0:
        raise DualityCheckFailed(f"coupling spectral radius {rho:.6f} not below one")


def recover_downlink(
    uplink: UplinkResult,
    lam: float,
    q: np.ndarray,
    h: np.ndarray,
    gammas: np.ndarray,
    sigma2: float,
) -> SubproblemResult:
    """Map a converged uplink solution to downlink beamformers.

    Solves (D - F) p = sigma2 * 1 for the downlink powers, scales each
    combiner into a beamformer column, and verifies the downlink SINR
    equalities that the coupling solve enforces by construction.
    """
    if uplink.status is not SubproblemStatus.CONVERGED:
        return SubproblemResult(status=uplink.status, uplink=uplink)
    a, _ = effective_noise_matrix(lam, q)
    d, f = coupling_matrices(uplink.u, h, gammas)
    rho = spectral_radius_nonneg(f / d[:, None])
    if not rho < 1.0 - 1e-12:
        raise SingularCoupling(f"spectral radius {rho:.12f} at the feasibility boundary")
    coupling = np.diag(d) - f
    try:
        p = np.linalg.solve(coupling, np.full(h.shape[1], sigma2))
    except np.linalg.LinAlgError as exc:
        raise SingularCoupling(str(exc)) from exc
    if np.any(p <= 0.0):
        raise SingularCoupling(f"nonpositive downlink power {p.min():.3e}")
    v = uplink.u * np.sqrt(p)
    gains = np.abs(h.conj().T @ v) ** 2
    desired = np.diagonal(gains)
    interference = gains.sum(axis=1) - desired
    sinr = desired / (interference + sigma2)
    rel = np.abs(sinr - gammas) / gammas
    if rel.max() > SINR_EQUALITY_TOL:
        raise DualityCheckFailed(
            f"downlink SINR off target by {rel.max():.3e} relative after recovery"
        )
    objective = float(np.real(np.einsum("ik,ij,jk->", v.conj(), a, v)))
    return SubproblemResult(
        status=SubproblemStatus.CONVERGED,
        v=v,
        u=uplink.u,
        z=uplink.z,
        p=p,
        objective=objective,
        coupling_radius=rho,
        uplink=uplink,
    )
