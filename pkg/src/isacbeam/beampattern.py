"""Transmit beam patterns on an angle grid, plus small lobe analysis helpers."""

from __future__ import annotations

import numpy as np

from .sensing import steering_vector

GRID_START_DEG = -90.0
GRID_STOP_DEG = 90.0
GRID_STEP_DEG = 0.1


def default_grid() -> np.ndarray:
    n = int(round((GRID_STOP_DEG - GRID_START_DEG) / GRID_STEP_DEG)) + 1
    return GRID_START_DEG + GRID_STEP_DEG * np.arange(n)


def beam_pattern(v: np.ndarray, grid_deg: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Total transmit gain sum_k |a_T(theta)^H v_k|^2 over the angle grid.

    Returns (grid in degrees, linear gain, gain in dB normalized to the peak).
    """
    grid = default_grid() if grid_deg is None else np.asarray(grid_deg, dtype=float)
    n_tx = v.shape[0]
    steering = np.stack([steering_vector(n_tx, t) for t in np.deg2rad(grid)], axis=1)
    gains = np.sum(np.abs(steering.conj().T @ v) ** 2, axis=1)
    peak = gains.max()
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(gains / peak)
    return grid, gains, db


def local_maxima(grid: np.ndarray, gains: np.ndarray) -> np.ndarray:
    """Angles of strict interior local maxima of the pattern."""
    g = np.asarray(gains)
    mask = (g[1:-1] >= g[:-2]) & (g[1:-1] > g[2:])
    return grid[1:-1][mask]


def peak_near(grid: np.ndarray, gains: np.ndarray, angle_deg: float, window_deg: float = 5.0) -> float | None:
    """Angle of the largest local maximum within a window, or None."""
    peaks = local_maxima(grid, gains)
    sel = peaks[np.abs(peaks - angle_deg) <= window_deg]
    if sel.size == 0:
        return None
    heights = [gains[np.argmin(np.abs(grid - p))] for p in sel]
    return float(sel[int(np.argmax(heights))])


def lobe_width_db(
    grid: np.ndarray, gains: np.ndarray, angle_deg: float, drop_db: float = 3.0
) -> float:
    """Width of the lobe containing ``angle_deg`` at ``drop_db`` below its peak."""
    peak_angle = peak_near(grid, gains, angle_deg)
    if peak_angle is None:
        raise ValueError(f"no lobe near {angle_deg} degrees")
    i_peak = int(np.argmin(np.abs(grid - peak_angle)))
    threshold = gains[i_peak] * 10.0 ** (-drop_db / 10.0)
    lo = i_peak
    while lo > 0 and gains[lo - 1] >= threshold:
        lo -= 1
    hi = i_peak
    while hi < len(grid) - 1 and gains[hi + 1] >= threshold:
        hi += 1
    return float(grid[hi] - grid[lo])
