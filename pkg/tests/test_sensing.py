"""Steering vectors, channel derivatives and prior-averaged statistics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import isacbeam as ib
from isacbeam.errors import QuadratureOrderTooSmall
from isacbeam.sensing import channel


def test_steering_examples():
    np.testing.assert_allclose(ib.steering_vector(4, 0.0), np.ones(4))
    np.testing.assert_allclose(
        ib.steering_vector(2, np.pi / 2), [1.0, -1.0], atol=1e-15
    )
    np.testing.assert_allclose(
        ib.steering_vector(3, np.pi / 6), [1.0, 1j, -1.0], atol=1e-15
    )


def test_steering_derivative_examples():
    for sign in (+1.0, -1.0):
        np.testing.assert_allclose(
            ib.steering_derivative(5, sign * np.pi / 2), np.zeros(5), atol=1e-15
        )
    np.testing.assert_allclose(ib.steering_derivative(2, 0.0), [0.0, 1j * np.pi])


@given(
    m=st.integers(min_value=1, max_value=32),
    theta=st.floats(min_value=-1.5, max_value=1.5),
)
@settings(max_examples=100, deadline=None)
def test_steering_derivative_matches_finite_difference(m, theta):
    h = 1e-6
    fd = (ib.steering_vector(m, theta + h) - ib.steering_vector(m, theta - h)) / (2 * h)
    np.testing.assert_allclose(ib.steering_derivative(m, theta), fd, atol=1e-6)


def test_channel_derivative_single_element_is_zero():
    model = ib.AoAModel(n_tx=1, n_rx=1, path_gain=2.0 - 1.0j)
    np.testing.assert_allclose(ib.channel_derivative(model, 0.37), np.zeros((1, 1)))


def test_channel_derivative_hand_case():
    model = ib.AoAModel(n_tx=2, n_rx=2, path_gain=1.0)
    a = np.array([1.0, 1.0])
    da = np.array([0.0, 1j * np.pi])
    expected = np.outer(da, a.conj()) + np.outer(a, da.conj())
    np.testing.assert_allclose(ib.channel_derivative(model, 0.0), expected, atol=1e-15)


def test_channel_derivative_matches_finite_difference(rng):
    for _ in range(100):
        model = ib.AoAModel(
            n_tx=int(rng.integers(1, 8)),
            n_rx=int(rng.integers(1, 8)),
            path_gain=complex(rng.standard_normal(), rng.standard_normal()),
        )
        theta = rng.uniform(-1.4, 1.4)
        h = 1e-6
        fd = (channel(model, theta + h) - channel(model, theta - h)) / (2 * h)
        np.testing.assert_allclose(ib.channel_derivative(model, theta), fd, atol=1e-6)


def test_prior_curvature_value():
    model = ib.AoAModel(n_tx=4, n_rx=4, prior_std_deg=2.5)
    stats = ib.compute_statistics(model)
    expected = 1.0 / np.deg2rad(2.5) ** 2
    np.testing.assert_allclose(stats.c, [[expected]], rtol=1e-14)
    assert abs(expected - 525.25) < 0.1


def test_degenerate_prior_limit():
    model = ib.AoAModel(n_tx=5, n_rx=3, prior_mean_deg=12.0, prior_std_deg=1e-7)
    stats = ib.compute_statistics(model)
    gdot = ib.channel_derivative(model, model.prior_mean_rad)
    np.testing.assert_allclose(
        stats.t[0, 0], gdot.conj().T @ gdot, rtol=1e-8, atol=1e-10
    )


def test_statistics_invariants(rng):
    for _ in range(20):
        model = ib.AoAModel(
            n_tx=int(rng.integers(2, 10)),
            n_rx=int(rng.integers(2, 10)),
            path_gain=complex(rng.standard_normal(), rng.standard_normal()),
            prior_mean_deg=float(rng.uniform(-60, 60)),
            prior_std_deg=float(rng.uniform(0.5, 15.0)),
        )
        stats = ib.compute_statistics(model)
        stats.validate()
        t00 = stats.t[0, 0]
        assert np.abs(t00 - t00.conj().T).max() < 1e-12 * np.abs(t00).max()
        eigs = np.linalg.eigvalsh(t00)
        assert eigs[0] >= -1e-10 * eigs[-1]


def test_quadrature_converged_on_shipped_scenarios():
    for std in (2.5, 10.0):
        model = ib.AoAModel(n_tx=20, n_rx=20, prior_std_deg=std)
        ib.compute_statistics(model, self_check=True)


def test_quadrature_self_check_raises_when_order_too_small():
    model = ib.AoAModel(n_tx=20, n_rx=20, prior_std_deg=20.0, quadrature_order=3)
    with pytest.raises(QuadratureOrderTooSmall):
        ib.compute_statistics(model, self_check=True)


def test_quadrature_matches_monte_carlo():
    model = ib.AoAModel(n_tx=6, n_rx=5, prior_mean_deg=5.0, prior_std_deg=4.0)
    stats = ib.compute_statistics(model)
    rng = np.random.default_rng(1234)
    draws = rng.normal(model.prior_mean_rad, model.prior_std_rad, size=1_000_000)
    # accumulate scalar receive-side factors; the transmit outer products
    # are then weighted Gram matrices over all draws
    a_t = np.exp(1j * np.pi * np.outer(np.arange(6), np.sin(draws)))
    da_t = 1j * np.pi * np.arange(6)[:, None] * np.cos(draws) * a_t
    a_r = np.exp(1j * np.pi * np.outer(np.arange(5), np.sin(draws)))
    da_r = 1j * np.pi * np.arange(5)[:, None] * np.cos(draws) * a_r
    g2 = abs(model.path_gain) ** 2
    c_dd = np.sum(np.abs(da_r) ** 2, axis=0)
    c_da = np.einsum("ms,ms->s", da_r.conj(), a_r)
    c_aa = np.sum(np.abs(a_r) ** 2, axis=0)
    n = draws.size
    mc = g2 * (
        (a_t * c_dd) @ a_t.conj().T
        + (a_t * c_da) @ da_t.conj().T
        + (da_t * c_da.conj()) @ a_t.conj().T
        + (da_t * c_aa) @ da_t.conj().T
    ) / n
    scale = np.abs(stats.t[0, 0]).max()
    assert np.abs(mc - stats.t[0, 0]).max() / scale < 1e-2


def test_model_validation():
    with pytest.raises(ValueError):
        ib.AoAModel(n_tx=4, n_rx=4, prior_std_deg=0.0)
    with pytest.raises(ValueError):
        ib.AoAModel(n_tx=4, n_rx=4, quadrature_order=1)
    with pytest.raises(ValueError):
        ib.AoAModel(n_tx=0, n_rx=4)
