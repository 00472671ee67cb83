"""Property-based checks of structural invariants on random and built-in models."""

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from monwalk import (
    averaged_probability_matrix,
    build_localized_basis,
    build_plane_wave_basis,
    eigenvalues,
    inverse_participation_ratio,
    ipr_localized_closed_form,
    make_model,
    monitored_matrix,
    transition_stats,
    unitary_matrix,
    validate_basis,
)
from monwalk.monitored import (
    amplitude_matrix_power,
    amplitude_projected,
    amplitude_recursion,
    kernel,
    path_sum_series,
)

from conftest import random_model

fast = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
sizes = st.integers(min_value=2, max_value=64)
taus = st.floats(min_value=0.0, max_value=7.0, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@fast
@given(n=sizes, builder=st.sampled_from([build_localized_basis, build_plane_wave_basis]))
def test_builtin_bases_orthonormal(n, builder):
    report = validate_basis(builder(n), 1e-10)
    assert report.passed
    assert report.row_residual <= 1e-10 and report.col_residual <= 1e-10


@fast
@given(n=sizes, data=st.data())
def test_localized_ipr_closed_form(n, data):
    k = data.draw(st.integers(min_value=2, max_value=n))
    model = make_model("localized", n=n)
    c = inverse_participation_ratio(model, k)
    assert abs(c - ipr_localized_closed_form(n, k)) <= 1e-12
    assert 1.0 / n - 1e-12 <= c <= 1.0 + 1e-12


@fast
@given(n=st.integers(2, 12), seed=seeds, t=st.floats(-20, 20, allow_nan=False))
def test_unitary_inverse(n, seed, t):
    model = random_model(np.random.default_rng(seed), n)
    U = unitary_matrix(model, t)
    np.testing.assert_allclose(U @ unitary_matrix(model, -t), np.eye(n), atol=1e-10)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(n), atol=1e-10)


@fast
@given(n=st.integers(2, 12), seed=seeds, tau=taus, data=st.data())
def test_kernel_projector_and_disk(n, seed, tau, data):
    model = random_model(np.random.default_rng(seed), n, degenerate=data.draw(st.booleans()))
    M = data.draw(st.integers(1, n))
    K = kernel(model, M)
    np.testing.assert_allclose(K @ K, K, atol=1e-12)
    np.testing.assert_allclose(K, K.conj().T, atol=1e-14)
    lam = eigenvalues(monitored_matrix(model, M, tau))
    assert np.max(np.abs(lam)) <= 1 + 1e-10
    assert np.min(np.abs(lam)) <= 1e-8  # the measured direction is removed


@fast
@given(n=st.integers(2, 5), seed=seeds, tau=taus, data=st.data())
def test_three_way_agreement(n, seed, tau, data):
    model = random_model(np.random.default_rng(seed), n)
    M = data.draw(st.integers(1, n))
    Mp = data.draw(st.integers(1, n))
    m_path = 4 if n <= 4 else 3
    a = amplitude_matrix_power(model, M, Mp, tau, 30).values
    b = amplitude_recursion(model, M, Mp, tau, 30).values
    c = amplitude_projected(model, M, Mp, tau, 30).values
    d = path_sum_series(model, M, Mp, tau, m_path).values
    np.testing.assert_allclose(a, b, atol=1e-10)
    np.testing.assert_allclose(a, c, atol=1e-10)
    np.testing.assert_allclose(a[:m_path], d, atol=1e-10)


@fast
@given(n=st.integers(2, 10), seed=seeds, tau=taus, data=st.data())
def test_cumulative_monotone_bounded(n, seed, tau, data):
    model = random_model(np.random.default_rng(seed), n)
    M = data.draw(st.integers(1, n))
    Mp = data.draw(st.integers(1, n))
    stats = transition_stats(amplitude_matrix_power(model, M, Mp, tau, 200))
    assert np.all(np.diff(stats.cumulative) >= 0)
    assert stats.cumulative[-1] <= 1 + 1e-9
    assert np.all(stats.mtt_curve[stats.defined] >= 0)


@fast
@given(n=st.integers(2, 10), seed=seeds, degenerate=st.booleans())
def test_averaged_matrix_doubly_stochastic(n, seed, degenerate):
    model = random_model(np.random.default_rng(seed), n, degenerate=degenerate)
    P = averaged_probability_matrix(model).entries
    assert np.all(P >= -1e-15)
    np.testing.assert_allclose(P.sum(axis=0), 1, atol=1e-10)
    np.testing.assert_allclose(P.sum(axis=1), 1, atol=1e-10)
    np.testing.assert_array_equal(P, P.T)
