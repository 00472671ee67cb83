"""Monitored evolution: repeated projective measurement of one graph state.

Everything is expressed in the energy basis, where the evolution between
measurements is the matrix ``T[k, l] = z_k K[k, l] z_l`` with the rank
``n - 1`` projector ``K[k, l] = delta_kl - conj(q_{M,k}) q_{M,l}``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    BudgetExceededError,
    ConsistencyError,
    NumericalError,
    PreconditionError,
)
from .spectral import PhaseVector, check_index, phase_factors, unitary_matrix

EOS_TOL = 1e-12
PHASE_TOL = 1e-9
PATH_SUM_BUDGET = 10**7

METHODS = ("matrix_power", "recursion", "path_sum", "projected")


@dataclass(frozen=True)
class MonitoredOperator:
    matrix: np.ndarray
    measured_index: int
    tau: float
    phases: PhaseVector
    kernel: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EosSet:
    """Energy indices ``j`` (1-based) with ``|q_{M,j}| <= tol``."""

    measured_index: int
    indices: frozenset
    tol: float

    def complement(self, n):
        return [j for j in range(1, n + 1) if j not in self.indices]


@dataclass(frozen=True)
class AmplitudeSeries:
    values: np.ndarray
    measured_index: int
    initial_index: int
    tau: float
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def __len__(self):
        return len(self.values)

    @property
    def probs(self):
        return np.abs(self.values) ** 2


def kernel(model, m_idx):
    """Projector ``delta_kl - conj(q_{M,k}) q_{M,l}`` in the energy basis."""
    qM = model.row(m_idx)
    return np.eye(model.n, dtype=np.complex128) - np.outer(qM.conj(), qM)


def monitored_matrix(model, m_idx, tau):
    if tau < 0:
        raise ValueError("tau must be non-negative")
    K = kernel(model, m_idx)
    phases = phase_factors(model, tau)
    z = phases.z
    T = z[:, None] * K * z[None, :]
    T.setflags(write=False)
    K.setflags(write=False)
    return MonitoredOperator(T, int(m_idx), float(tau), phases, K)


def detect_eos(model, m_idx, tol=EOS_TOL):
    if tol < 0:
        raise ValueError("tol must be non-negative")
    qM = model.row(m_idx)
    idx = frozenset(int(j) + 1 for j in np.flatnonzero(np.abs(qM) <= tol))
    return EosSet(int(m_idx), idx, float(tol))


def projected_matrix(op, eos):
    """Restriction of ``op.matrix`` to energy indices outside the EOS set."""
    if op.measured_index != eos.measured_index:
        raise ConsistencyError(
            f"operator measures {op.measured_index}, EOS set is for "
            f"{eos.measured_index}"
        )
    keep = np.array(eos.complement(op.n), dtype=int) - 1
    return op.matrix[np.ix_(keep, keep)].copy()


def _start_vectors(model, m_from, m_to, tau):
    z = phase_factors(model, tau).z
    row = model.row(m_from) * z
    v0 = model.row(m_to).conj() * z
    return row, v0


def _check_mmax(m_max):
    if isinstance(m_max, bool) or not isinstance(m_max, (int, np.integer)) or m_max < 1:
        raise ValueError(f"m_max must be a positive integer, got {m_max!r}")
    return int(m_max)


def amplitude_matrix_power(model, m_from, m_to, tau, m_max):
    """``phi(m) = sum_{kl} q_{M,k} z_k [T^(m-1)]_{kl} conj(q_{M',l}) z_l``.

    Powers of ``T`` are never formed; the start vector is pushed through
    ``T`` one step at a time.
    """
    m_max = _check_mmax(m_max)
    op = monitored_matrix(model, m_from, tau)
    check_index(m_to, model.n, "m_to")
    row, v0 = _start_vectors(model, m_from, m_to, tau)
    vals = kernels.monitored_amplitudes(
        np.ascontiguousarray(op.matrix), row, v0, m_max
    )
    return AmplitudeSeries(vals, int(m_from), int(m_to), float(tau), "matrix_power")


def amplitude_projected(model, m_from, m_to, tau, m_max, eos_tol=EOS_TOL):
    """Same series as :func:`amplitude_matrix_power`, computed on the
    sub-space left after removing the energy-orthogonal states of ``m_from``."""
    m_max = _check_mmax(m_max)
    op = monitored_matrix(model, m_from, tau)
    check_index(m_to, model.n, "m_to")
    eos = detect_eos(model, m_from, eos_tol)
    keep = np.array(eos.complement(model.n), dtype=int) - 1
    P = np.ascontiguousarray(projected_matrix(op, eos))
    row, v0 = _start_vectors(model, m_from, m_to, tau)
    vals = kernels.monitored_amplitudes(
        P, np.ascontiguousarray(row[keep]), np.ascontiguousarray(v0[keep]), m_max
    )
    return AmplitudeSeries(vals, int(m_from), int(m_to), float(tau), "projected")


def recursion_rows(model, m_from, m_to, tau, m_max):
    """All ``phi_{k,M'}(m)`` of the site-basis recursion, shape ``(m_max, n)``.

    Row ``m-1`` holds the amplitudes on every graph state ``k`` just before
    the ``m``-th measurement of ``m_from``; column ``m_from - 1`` is the
    monitored amplitude itself.
    """
    m_max = _check_mmax(m_max)
    a = check_index(m_from, model.n, "m_from")
    b = check_index(m_to, model.n, "m_to")
    U = np.ascontiguousarray(unitary_matrix(model, tau))
    return kernels.recursion_amplitudes(U, a, np.ascontiguousarray(U[:, b]), m_max)


def amplitude_recursion(model, m_from, m_to, tau, m_max):
    rows = recursion_rows(model, m_from, m_to, tau, m_max)
    vals = np.ascontiguousarray(rows[:, m_from - 1])
    return AmplitudeSeries(vals, int(m_from), int(m_to), float(tau), "recursion")


def amplitude_path_sum(model, m_from, m_to, tau, m, budget=PATH_SUM_BUDGET):
    """Single amplitude ``phi(m)`` as an explicit sum over ``n**m`` index paths.

    Exponential cost; meant as an independent check on small instances.
    """
    m = _check_mmax(m)
    required = model.n**m
    if required > budget:
        raise BudgetExceededError(required, budget)
    K = np.ascontiguousarray(kernel(model, m_from))
    z = phase_factors(model, tau).z
    return kernels.path_sum(
        np.ascontiguousarray(z * z),
        np.ascontiguousarray(model.row(m_from)),
        K,
        np.ascontiguousarray(model.row(m_to).conj()),
        m,
    )


def path_sum_series(model, m_from, m_to, tau, m_max, budget=PATH_SUM_BUDGET):
    """:func:`amplitude_path_sum` for ``m = 1..m_max`` as a series."""
    m_max = _check_mmax(m_max)
    vals = np.array(
        [amplitude_path_sum(model, m_from, m_to, tau, m, budget) for m in range(1, m_max + 1)]
    )
    return AmplitudeSeries(vals, int(m_from), int(m_to), float(tau), "path_sum")


def _canonical_sign(v):
    """Rotate ``v`` so its first non-negligible component is real positive."""
    nz = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))
    if nz.size == 0:
        return v
    c = v[nz[0]]
    out = v * (abs(c) / c)
    out[nz[0]] = abs(c)
    return out


def eigenvalues(op):
    """Eigenvalues of ``op.matrix``, largest modulus first."""
    try:
        lam = np.linalg.eigvals(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigenvalue solver failed: {exc}", matrix=np.array(op.matrix)
        ) from exc
    order = np.lexsort((np.angle(lam), -np.abs(lam)))
    return lam[order]


def degenerate_eigenvector(model, m_idx, j, k, tau, phase_tol=PHASE_TOL):
    """Non-decaying eigenvector ``alpha e_j + beta e_k`` for ``z_j == z_k``.

    The coefficients make the vector orthogonal to ``conj(Q_M)`` so that the
    measurement projector acts trivially; the eigenvalue is ``z_k**2``.
    """
    a = check_index(j, model.n, "j")
    b = check_index(k, model.n, "k")
    if a == b:
        raise PreconditionError("j and k must differ")
    z = phase_factors(model, tau).z
    if abs(z[a] - z[b]) > phase_tol:
        raise PreconditionError(
            f"z_{j} and z_{k} differ by {abs(z[a] - z[b]):.3g} > {phase_tol:g}"
        )
    qM = model.row(m_idx)
    denom = z[a] * qM[a]
    if abs(denom) <= EOS_TOL:
        raise PreconditionError(
            f"q_({m_idx},{j}) vanishes; state {j} is energy-orthogonal"
        )
    beta = 1.0
    alpha = -beta * z[b] * qM[b] / denom
    v = np.zeros(model.n, dtype=np.complex128)
    v[a] = alpha
    v[b] = beta
    v /= np.linalg.norm(v)
    return _canonical_sign(v)


def stationary_states(model, m_idx, tau, tol=1e-10):
    """Energy indices with ``z_k**2 == 1`` and ``q_{M,k} == 0`` (within ``tol``)."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    z = phase_factors(model, tau).z
    qM = model.row(m_idx)
    hit = (np.abs(z * z - 1.0) <= tol) & (np.abs(qM) <= tol)
    return frozenset(int(i) + 1 for i in np.flatnonzero(hit))


def resolvent_pole_residual(op, z):
    """Smallest singular value of ``z - T``; zero exactly at an eigenvalue."""
    A = complex(z) * np.eye(op.n) - op.matrix
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError:
        return 0.0
    return float(s[-1])


def projected_initial_vector(model, m_idx, m_init, tau, eos_tol=EOS_TOL):
    eos = detect_eos(model, m_idx, eos_tol)
    z = phase_factors(model, tau).z
    v = model.row(m_init).conj() * z
    for j in eos.indices:
        v[j - 1] = 0.0
    return v


def equivalence_class_check(model, m_idx, m_a, m_b, tau, tol=1e-12, eos_tol=EOS_TOL):
    """True if initial states ``m_a`` and ``m_b`` evolve identically under
    monitoring of ``m_idx`` (their projected start vectors coincide)."""
    check_index(m_idx, model.n, "m_idx")
    if m_idx in (m_a, m_b):
        raise PreconditionError("initial states must differ from the measured one")
    if m_a == m_b:
        return True
    va = projected_initial_vector(model, m_idx, m_a, tau, eos_tol)
    vb = projected_initial_vector(model, m_idx, m_b, tau, eos_tol)
    return bool(np.max(np.abs(va - vb)) <= tol)


def equivalence_classes(model, m_idx, tau, tol=1e-12, eos_tol=EOS_TOL):
    """Partition of the initial states ``1..n`` into identical-evolution groups."""
    vecs = [projected_initial_vector(model, m_idx, k, tau, eos_tol) for k in range(1, model.n + 1)]
    classes = []
    for k, v in enumerate(vecs, start=1):
        for cls in classes:
            if np.max(np.abs(vecs[cls[0] - 1] - v)) <= tol:
                cls.append(k)
                break
        else:
            classes.append([k])
    return [tuple(c) for c in classes]
