"""Sensing-channel models and their derivative-correlation statistics.

The estimation task enters the beamformer design only through two objects:
the grid of matrices ``T[i][j] = E{Gdot_i^H Gdot_j}`` (expectations of
channel-derivative cross products over the parameter prior) and the real
prior-information matrix ``C``.  Any channel model able to produce that pair
plugs into the Fisher-information machinery unchanged.  The concrete model
shipped here is a single-target angle-of-arrival channel with a Gaussian
prior on the angle; both arrays are uniform linear with half-wavelength
spacing.

Angles are radians everywhere in this module; degrees exist only in the
configuration layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, QuadratureOrderTooSmall

DEFAULT_QUADRATURE_ORDER = 80


def steering_vector(m: int, theta_rad: float) -> np.ndarray:
    """Array response of an m-element ULA, element n = exp(j*pi*n*sin(theta))."""
    n = np.arange(m)
    return np.exp(1j * np.pi * n * np.sin(theta_rad))


def steering_derivative(m: int, theta_rad: float) -> np.ndarray:
    """Derivative of :func:`steering_vector` with respect to the angle."""
    n = np.arange(m)
    return 1j * np.pi * n * np.cos(theta_rad) * np.exp(1j * np.pi * n * np.sin(theta_rad))


@dataclass(frozen=True)
class SensingStatistics:
    """Derivative-correlation grid and prior information of a sensing task.

    ``t`` has shape (L, L, N_T, N_T) with ``t[i, j] = E{Gdot_i^H Gdot_j}``;
    ``c`` is the real symmetric (L, L) prior-information matrix.
    """

    t: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        c = np.asarray(self.c, dtype=float)
        if t.ndim != 4 or t.shape[0] != t.shape[1] or t.shape[2] != t.shape[3]:
            raise DimensionMismatch(f"t must be (L, L, N, N), got {t.shape}")
        if c.shape != t.shape[:2]:
            raise DimensionMismatch(f"c must be (L, L) = {t.shape[:2]}, got {c.shape}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "c", c)

    @property
    def l_dim(self) -> int:
        return self.t.shape[0]

    @property
    def n_tx(self) -> int:
        return self.t.shape[2]

    def validate(self, hermitian_tol: float = 1e-12, psd_tol: float = 1e-10) -> None:
        """Check the pair-Hermitian, contraction-PSD and prior-PSD invariants.

        The contraction invariant is checked through the (L*N, L*N) block
        matrix of the grid, which is positive semidefinite for every grid of
        the Gram form E{Gdot_i^H Gdot_j} and implies PSD-ness of every real
        contraction sum b_i b_j T[i][j].
        """
        l, n = self.l_dim, self.n_tx
        scale = max(np.abs(self.t).max(), 1e-300)
        for i in range(l):
            for j in range(l):
                if np.abs(self.t[j, i] - self.t[i, j].conj().T).max() > hermitian_tol * scale:
                    raise ValueError(f"t[{j}][{i}] is not the conjugate transpose of t[{i}][{j}]")
        block = self.t.transpose(0, 2, 1, 3).reshape(l * n, l * n)
        eigs = np.linalg.eigvalsh((block + block.conj().T) / 2.0)
        if eigs[0] < -psd_tol * max(eigs[-1], 0.0) - psd_tol * scale:
            raise ValueError("derivative-correlation grid is not PSD as a block matrix")
        ceigs = np.linalg.eigvalsh((self.c + self.c.T) / 2.0)
        if np.abs(self.c - self.c.T).max() > hermitian_tol * max(np.abs(self.c).max(), 1.0):
            raise ValueError("prior-information matrix is not symmetric")
        if ceigs[0] < -psd_tol * max(ceigs[-1], 1.0):
            raise ValueError("prior-information matrix is not PSD")


@dataclass(frozen=True)
class AoAModel:
    """Single-target angle-of-arrival model with a Gaussian prior on the angle.

    The round-trip channel is G(theta) = path_gain * a_R(theta) a_T(theta)^H
    with both arrays uniform linear at half-wavelength spacing.
    """

    n_tx: int
    n_rx: int
    path_gain: complex = 1.0 + 0.0j
    prior_mean_deg: float = 0.0
    prior_std_deg: float = 2.5
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("antenna counts must be positive")
        if not self.prior_std_deg > 0:
            raise ValueError("prior_std_deg must be positive")
        if self.quadrature_order < 2:
            raise ValueError("quadrature_order must be at least 2")

    @property
    def prior_mean_rad(self) -> float:
        return float(np.deg2rad(self.prior_mean_deg))

    @property
    def prior_std_rad(self) -> float:
        return float(np.deg2rad(self.prior_std_deg))


def channel(model: AoAModel, theta_rad: float) -> np.ndarray:
    """Round-trip channel G(theta) = alpha * a_R a_T^H, shape (N_R, N_T)."""
    a_r = steering_vector(model.n_rx, theta_rad)
    a_t = steering_vector(model.n_tx, theta_rad)
    return model.path_gain * np.outer(a_r, a_t.conj())


def channel_derivative(model: AoAModel, theta_rad: float) -> np.ndarray:
    """Angle derivative of the round-trip channel, shape (N_R, N_T)."""
    a_r = steering_vector(model.n_rx, theta_rad)
    a_t = steering_vector(model.n_tx, theta_rad)
    da_r = steering_derivative(model.n_rx, theta_rad)
    da_t = steering_derivative(model.n_tx, theta_rad)
    return model.path_gain * (np.outer(da_r, a_t.conj()) + np.outer(a_r, da_t.conj()))


def _quadrature_t00(model: AoAModel, order: int) -> np.ndarray:
    """E{Gdot^H Gdot} over the Gaussian angle prior by Gauss-Hermite quadrature."""
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    thetas = model.prior_mean_rad + np.sqrt(2.0) * model.prior_std_rad * nodes
    acc = np.zeros((model.n_tx, model.n_tx), dtype=complex)
    # fixed left-to-right summation keeps the result reproducible
    for theta, w in zip(thetas, weights):
        gdot = channel_derivative(model, theta)
        acc += w * (gdot.conj().T @ gdot)
    return acc / np.sqrt(np.pi)


def compute_statistics(model: AoAModel, self_check: bool = False) -> SensingStatistics:
    """Statistics of the AoA model: T[0][0] from quadrature, C from the prior curvature.

    With ``self_check`` the quadrature is repeated at twice the order and a
    relative change above 1e-6 in any entry raises QuadratureOrderTooSmall.
    """
    t00 = _quadrature_t00(model, model.quadrature_order)
    if self_check:
        t00_fine = _quadrature_t00(model, 2 * model.quadrature_order)
        scale = max(np.abs(t00_fine).max(), 1e-300)
        rel = np.abs(t00 - t00_fine).max() / scale
        if rel > 1e-6:
            raise QuadratureOrderTooSmall(
                f"order {model.quadrature_order} differs from order "
                f"{2 * model.quadrature_order} by {rel:.3e} relative"
            )
    t00 = (t00 + t00.conj().T) / 2.0
    c = np.array([[1.0 / model.prior_std_rad**2]])
    stats = SensingStatistics(t=t00[np.newaxis, np.newaxis], c=c)
    stats.validate()
    return stats
