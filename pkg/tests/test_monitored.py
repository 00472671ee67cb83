import numpy as np
import pytest

from monwalk import (
    amplitude_matrix_power,
    amplitude_path_sum,
    amplitude_projected,
    amplitude_recursion,
    degenerate_eigenvector,
    detect_eos,
    eigenvalues,
    equivalence_class_check,
    kernel,
    make_model,
    monitored_matrix,
    path_sum_series,
    phase_factors,
    projected_matrix,
    recursion_rows,
    resolvent_pole_residual,
    stationary_states,
    unitary_matrix,
)
from monwalk.errors import (
    BudgetExceededError,
    ConsistencyError,
    IndexRangeError,
    PreconditionError,
)
from monwalk.monitored import AmplitudeSeries, EosSet

from conftest import random_model, site_basis_amplitudes


class TestKernel:
    def test_identity(self):
        K = kernel(make_model("identity", n=3), 1)
        np.testing.assert_array_equal(K, np.diag([0, 1, 1]))

    @pytest.mark.parametrize("basis", ["localized", "plane_wave"])
    def test_projector(self, basis):
        m = make_model(basis, n=10)
        for M in range(1, 11):
            K = kernel(m, M)
            assert np.max(np.abs(K @ K - K)) <= 1e-12
            # annihilates conj(Q_M), leaves the other conj(Q_M') unchanged
            np.testing.assert_allclose(K @ m.row(M).conj(), 0, atol=1e-14)
            other = 1 if M != 1 else 2
            np.testing.assert_allclose(K @ m.row(other).conj(), m.row(other).conj(), atol=1e-14)

    def test_eigenvalues(self, loc10):
        nu = np.sort(np.linalg.eigvalsh(kernel(loc10, 5)))
        np.testing.assert_allclose(nu, [0] + [1] * 9, atol=1e-10)

    def test_bad_index(self, loc10):
        with pytest.raises(IndexRangeError):
            kernel(loc10, 0)


class TestMonitoredMatrix:
    def test_identity_basis_is_diagonal(self):
        m = make_model("identity", n=4)
        op = monitored_matrix(m, 2, 0.7)
        z = op.phases.z
        expected = np.diag(z**2 * (np.arange(1, 5) != 2))
        np.testing.assert_allclose(op.matrix, expected, atol=1e-15)

    def test_plane_wave_elements(self, pw10):
        M, tau = 5, 1.0
        z = phase_factors(pw10, tau).z
        k = np.arange(1, 11)
        expected = np.diag(z**2) - np.exp(
            -2j * np.pi * np.subtract.outer(k, k) * (M - 1) / 10
        ) * np.outer(z, z) / 10
        np.testing.assert_allclose(monitored_matrix(pw10, M, tau).matrix, expected, atol=1e-14)

    def test_tau_zero_is_kernel(self, loc10):
        op = monitored_matrix(loc10, 3, 0.0)
        np.testing.assert_allclose(op.matrix, op.kernel, atol=0)

    def test_rejects_negative_tau(self, loc10):
        with pytest.raises(ValueError):
            monitored_matrix(loc10, 3, -1.0)


class TestEos:
    def test_localized_middle(self, loc10):
        assert detect_eos(loc10, 5).indices == {2, 3, 4}

    def test_localized_last(self, loc10):
        eos = detect_eos(loc10, 10)
        assert eos.indices == set(range(2, 10))
        assert eos.complement(10) == [1, 10]

    def test_plane_wave_none(self, pw10):
        assert all(not detect_eos(pw10, M).indices for M in range(1, 11))

    def test_isolated_rows(self, loc10):
        op = monitored_matrix(loc10, 5, 1.3)
        for j in detect_eos(loc10, 5).indices:
            unit = np.zeros(10)
            unit[j - 1] = 1
            zj2 = op.phases.z[j - 1] ** 2
            np.testing.assert_allclose(op.matrix[j - 1], zj2 * unit, atol=1e-14)
            np.testing.assert_allclose(op.matrix[:, j - 1], zj2 * unit, atol=1e-14)


class TestProjected:
    def test_two_level(self):
        for N in (10, 32):
            m = make_model("localized", n=N)
            op = monitored_matrix(m, N, 1.0)
            P = projected_matrix(op, detect_eos(m, N))
            zN = op.phases.z[-1]
            expected = np.array(
                [[N - 1, zN * np.sqrt(N - 1)], [zN * np.sqrt(N - 1), zN**2]]
            ) / N
            np.testing.assert_allclose(P, expected, atol=1e-14)
            lam = np.sort_complex(np.linalg.eigvals(P))
            target = np.sort_complex(np.array([0, (zN**2 + N - 1) / N]))
            np.testing.assert_allclose(lam, target, atol=1e-12)

    def test_empty_eos(self, pw10):
        op = monitored_matrix(pw10, 3, 1.0)
        np.testing.assert_array_equal(projected_matrix(op, detect_eos(pw10, 3)), op.matrix)

    def test_mismatch(self, loc10):
        with pytest.raises(ConsistencyError):
            projected_matrix(monitored_matrix(loc10, 3, 1.0), detect_eos(loc10, 4))

    @pytest.mark.parametrize("tau", [0.3, 1.0, np.pi / 2])
    def test_projection_consistency(self, loc10, tau):
        for M in range(1, 11):
            for Mp in range(1, 11):
                a = amplitude_matrix_power(loc10, M, Mp, tau, 60).values
                b = amplitude_projected(loc10, M, Mp, tau, 60).values
                assert np.max(np.abs(a - b)) <= 1e-10


class TestAmplitudes:
    def test_identity_series(self):
        m = make_model("identity", n=4)
        # phi(1) carries the phase exp(-i E_2 tau); only its modulus is one
        s = amplitude_matrix_power(m, 2, 2, 1.0, 5)
        np.testing.assert_allclose(np.abs(s.values), [1, 0, 0, 0, 0], atol=1e-15)
        s = amplitude_matrix_power(m, 1, 1, 1.0, 5)
        np.testing.assert_allclose(s.values, [1, 0, 0, 0, 0], atol=1e-15)
        s = amplitude_matrix_power(m, 2, 3, 1.0, 5)
        np.testing.assert_allclose(s.values, 0, atol=1e-15)
        r = amplitude_recursion(m, 2, 2, 1.0, 5)
        np.testing.assert_allclose(np.abs(r.values), [1, 0, 0, 0, 0], atol=1e-15)

    def test_first_step_is_unitary(self, loc10, pw10):
        for m in (loc10, pw10):
            U = unitary_matrix(m, 0.8)
            for M, Mp in [(1, 1), (5, 2), (3, 9)]:
                assert amplitude_matrix_power(m, M, Mp, 0.8, 1).values[0] == pytest.approx(
                    U[M - 1, Mp - 1], abs=1e-14
                )
                assert amplitude_path_sum(m, M, Mp, 0.8, 1) == pytest.approx(
                    U[M - 1, Mp - 1], abs=1e-14
                )

    def test_return_probability(self, loc10):
        s = amplitude_matrix_power(loc10, 5, 5, 1.0, 500)
        assert np.sum(s.probs) == pytest.approx(1.0, abs=1e-3)

    def test_second_step_recursion_formula(self, pw10):
        U = unitary_matrix(pw10, 1.0)
        M, Mp = 3, 7
        expected = sum(U[M - 1, k] * U[k, Mp - 1] for k in range(10) if k != M - 1)
        assert amplitude_recursion(pw10, M, Mp, 1.0, 2).values[1] == pytest.approx(expected, abs=1e-14)

    def test_path_sum_small_localized(self):
        m = make_model("localized", n=4)
        a = amplitude_matrix_power(m, 4, 2, 1.0, 6).values
        p = path_sum_series(m, 4, 2, 1.0, 6).values
        assert np.max(np.abs(a - p)) <= 1e-12

    def test_path_sum_identity_zeno(self):
        m = make_model("identity", n=3)
        for M in (1, 2, 3):
            for Mp in (1, 2, 3):
                for mm in (2, 3, 5):
                    assert amplitude_path_sum(m, M, Mp, 0.9, mm) == 0

    def test_path_sum_budget(self, loc10):
        with pytest.raises(BudgetExceededError) as info:
            amplitude_path_sum(loc10, 1, 2, 1.0, 8)
        assert info.value.required == 10**8
        assert amplitude_path_sum(loc10, 1, 2, 1.0, 2, budget=100) is not None

    @pytest.mark.parametrize("basis", ["localized", "plane_wave"])
    @pytest.mark.parametrize("tau", [0.3, 1.0, np.pi / 2])
    def test_against_site_basis_oracle(self, basis, tau):
        m = make_model(basis, n=6)
        for M in range(1, 7):
            for Mp in range(1, 7):
                oracle = site_basis_amplitudes(m, M, Mp, tau, 40)
                got = amplitude_matrix_power(m, M, Mp, tau, 40).values
                assert np.max(np.abs(got - oracle)) <= 1e-10

    def test_random_models_three_ways(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 4, 5):
            m = random_model(rng, n)
            for M in range(1, n + 1):
                for Mp in range(1, n + 1):
                    a = amplitude_matrix_power(m, M, Mp, 0.9, 7).values
                    b = amplitude_recursion(m, M, Mp, 0.9, 7).values
                    c = path_sum_series(m, M, Mp, 0.9, 7).values
                    assert np.max(np.abs(a - b)) <= 1e-10
                    assert np.max(np.abs(a - c)) <= 1e-10

    def test_vanishing_overlap(self, loc10):
        # q_{10,j} q*_{M',j} = 0 for all j requires disjoint supports; use identity basis
        m = make_model("identity", n=5)
        s = amplitude_matrix_power(m, 1, 4, 1.0, 30)
        assert np.all(s.values == 0)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            AmplitudeSeries(np.zeros(2), 1, 1, 1.0, "magic")

    def test_bad_mmax(self, loc10):
        with pytest.raises(ValueError):
            amplitude_matrix_power(loc10, 1, 1, 1.0, 0)


def test_row_norm_decreases(loc10):
    # sum over initial states of |phi(m)|^2 is the squared norm of a row of U (Pi U)^(m-1)
    totals = np.zeros(30)
    for Mp in range(1, 11):
        totals += amplitude_matrix_power(loc10, 5, Mp, 1.0, 30).probs
    assert totals[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(totals[1:] <= 1.0 + 1e-12)
    strict = int(np.sum(totals[1:] < 1.0 - 1e-12))
    print(f"strictly below one for {strict} of {len(totals) - 1} steps")


def test_zeno_limit(loc10, pw10):
    for m in (loc10, pw10):
        for M in (1, 5, 10):
            for Mp in range(1, 11):
                if Mp == M:
                    continue
                assert np.sum(amplitude_matrix_power(m, M, Mp, 1e-4, 500).probs) <= 1e-3


class TestEigenvalues:
    def test_zero_present_and_sorted(self, loc10, pw10):
        for m in (loc10, pw10):
            lam = eigenvalues(monitored_matrix(m, 4, 1.0))
            assert np.min(np.abs(lam)) <= 1e-10
            assert np.all(np.diff(np.abs(lam)) <= 1e-12)
            assert np.max(np.abs(lam)) <= 1 + 1e-10

    def test_eos_eigenvalues_on_circle(self, loc10):
        op = monitored_matrix(loc10, 5, 1.0)
        lam = eigenvalues(op)
        for j in (2, 3, 4):
            assert np.min(np.abs(lam - op.phases.z[j - 1] ** 2)) <= 1e-10

    def test_plane_wave_inside(self, pw10):
        lam = eigenvalues(monitored_matrix(pw10, 5, 1.0))
        nonzero = lam[np.abs(lam) > 1e-10]
        assert np.all(np.abs(nonzero) < 1 - 1e-6)


class TestDegenerateEigenvector:
    @pytest.mark.parametrize("basis", ["localized", "plane_wave"])
    def test_full_period(self, basis):
        m = make_model(basis, n=10)
        tau = 4 * np.pi
        op = monitored_matrix(m, 5, tau)
        v = degenerate_eigenvector(m, 5, 1, 2, tau)
        z2 = op.phases.z[1] ** 2
        assert np.max(np.abs(op.matrix @ v - z2 * v)) <= 1e-10
        assert abs(np.vdot(m.row(5).conj(), v)) <= 1e-12
        assert abs(abs(z2) - 1) <= 1e-12
        assert np.linalg.norm(v) == pytest.approx(1.0)
        first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        assert first.imag == 0 and first.real > 0

    def test_random_complex_model(self):
        m = random_model(np.random.default_rng(5), 6, degenerate=True)
        v = degenerate_eigenvector(m, 3, 1, 2, 1.7)
        op = monitored_matrix(m, 3, 1.7)
        assert np.max(np.abs(op.matrix @ v - op.phases.z[1] ** 2 * v)) <= 1e-10

    def test_non_degenerate(self, loc10):
        with pytest.raises(PreconditionError):
            degenerate_eigenvector(loc10, 5, 1, 2, 1.0)

    def test_eos_pair(self, loc10):
        # z_2 == z_4 at tau = pi, but q_{5,2} = 0
        with pytest.raises(PreconditionError):
            degenerate_eigenvector(loc10, 5, 2, 4, np.pi)

    def test_unit_circle_invariant(self, loc10):
        # at tau = pi: z_1 == z_5 == z_9 etc.; each admissible pair yields eigenvalue z_k^2
        tau = np.pi
        lam = eigenvalues(monitored_matrix(loc10, 7, tau))
        z = phase_factors(loc10, tau).z
        q = loc10.row(7)
        for j in range(10):
            for k in range(10):
                if j != k and abs(z[j] - z[k]) <= 1e-9 and abs(q[j]) > 1e-12:
                    assert np.min(np.abs(lam - z[k] ** 2)) <= 1e-10


class TestStationary:
    def test_localized(self, loc10):
        assert 3 in stationary_states(loc10, 5, np.pi)

    def test_plane_wave(self, pw10):
        assert stationary_states(pw10, 4, 1.0) == frozenset()

    def test_identity(self):
        m = make_model("identity", n=6)
        assert stationary_states(m, 1, 2 * np.pi) == frozenset(range(2, 7))

    def test_stationary_component_persists(self, loc10):
        rows = recursion_rows(loc10, 5, 1, np.pi, 2000)
        # overlap of the undetected state with |E_3> never changes
        overlap = rows @ loc10.weights[:, 2].conj()
        np.testing.assert_allclose(overlap, loc10.weights[0, 2].conj(), atol=1e-10)
        # while the monitored amplitude itself has died out
        assert abs(rows[-1, 4]) <= 1e-12


class TestResolvent:
    def test_near_eigenvalue(self, pw10):
        op = monitored_matrix(pw10, 5, 1.0)
        lam = eigenvalues(op)
        norm = np.linalg.norm(op.matrix, 2)
        for l in lam:
            assert resolvent_pole_residual(op, l + 1e-6) <= 1e-5 * norm

    def test_outside_disk(self, loc10):
        op = monitored_matrix(loc10, 5, 1.0)
        assert resolvent_pole_residual(op, 2.0) >= 1.0 - 1e-10

    def test_normal_case_distance(self):
        m = make_model("identity", n=5)
        op = monitored_matrix(m, 2, 0.7)
        lam = eigenvalues(op)
        z = 0.3 + 0.1j
        assert resolvent_pole_residual(op, z) == pytest.approx(np.min(np.abs(lam - z)), abs=1e-12)

    def test_exact_eigenvalue(self):
        op = monitored_matrix(make_model("identity", n=3), 1, 0.0)
        assert resolvent_pole_residual(op, 1.0) == pytest.approx(0.0, abs=1e-15)


class TestEquivalence:
    def test_localized(self, loc10):
        for a in range(1, 5):
            for b in range(1, 5):
                assert equivalence_class_check(loc10, 5, a, b, 1.0)

    def test_plane_wave(self, pw10):
        assert not equivalence_class_check(pw10, 5, 1, 2, 1.0)

    def test_same(self, pw10):
        assert equivalence_class_check(pw10, 5, 3, 3, 1.0)

    def test_measured_excluded(self, pw10):
        with pytest.raises(PreconditionError):
            equivalence_class_check(pw10, 5, 5, 3, 1.0)

    def test_implies_identical_series(self, loc10):
        a = amplitude_matrix_power(loc10, 5, 1, 1.0, 200).values
        b = amplitude_matrix_power(loc10, 5, 4, 1.0, 200).values
        assert np.max(np.abs(a - b)) <= 1e-12


def test_dark_state_claim_holds_only_for_transposed_weights():
    """Open question: is <E_k|T^(m-1)|E_l> = delta_kl z_k^(2(m-1)) for M < k, l?"""
    tau, M, n = 0.7, 3, 10
    rows = make_model("localized", n=n)
    cols = make_model(rows.weights.T, energies=rows.energies)

    def deviation(model):
        T = monitored_matrix(model, M, tau).matrix
        P = np.linalg.matrix_power(T, 4)
        z = phase_factors(model, tau).z
        idx = np.arange(M, n)
        target = np.diag(z[idx] ** 8)
        return np.max(np.abs(P[np.ix_(idx, idx)] - target))

    assert deviation(rows) > 0.1
    assert deviation(cols) <= 1e-12


def test_eos_set_type():
    e = EosSet(2, frozenset({3}), 1e-12)
    assert e.complement(4) == [1, 2, 4]
