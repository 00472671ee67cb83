"""Spectral models: energies plus eigenbasis weights, and what follows from them.

A model is the pair ``(energies, weights)`` where ``weights[k-1, j-1]`` is the
overlap of graph state ``k`` with energy eigenstate ``j``. Every public index
in this package is 1-based; conversion to numpy offsets happens internally.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BasisError,
    DimensionError,
    DomainError,
    IndexRangeError,
    ShapeError,
)

DEFAULT_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class BasisReport:
    row_residual: float
    col_residual: float
    tol: float

    @property
    def passed(self):
        return self.row_residual <= self.tol and self.col_residual <= self.tol


@dataclass(frozen=True)
class SpectralModel:
    """Energies ``E_j`` and weights ``q[k, j]`` of a finite quantum walk.

    Parameters
    ----------
    energies : array_like, shape (n,)
        Real energy levels (units of the coupling J, hbar = 1).
    weights : array_like, shape (n, n)
        Complex weights, row = graph state, column = energy state.
    tol : float, optional
        Orthonormality tolerance checked on construction. Pass ``None`` to
        skip the check (e.g. to inspect a bad basis with :func:`validate_basis`).
    """

    energies: np.ndarray
    weights: np.ndarray
    tol: float | None = field(default=DEFAULT_ORTHO_TOL, compare=False)

    def __post_init__(self):
        energies = np.array(self.energies, dtype=float).reshape(-1)
        weights = np.array(self.weights, dtype=np.complex128)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise ShapeError(f"weights must be square, got shape {weights.shape}")
        if weights.shape[0] != energies.size:
            raise ShapeError(
                f"{energies.size} energies for a {weights.shape[0]}-dim basis"
            )
        if energies.size < 1:
            raise DimensionError("dimension must be positive")
        energies.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "weights", weights)
        if self.tol is not None:
            report = validate_basis(weights, self.tol)
            if not report.passed:
                raise BasisError(
                    "weights are not orthonormal: row residual "
                    f"{report.row_residual:.3g}, column residual "
                    f"{report.col_residual:.3g} (tol {self.tol:g})",
                    report,
                )

    @property
    def n(self):
        return self.energies.size

    def row(self, k):
        """Weights ``q_{k, j}`` of graph state ``k`` (1-based) over all j."""
        return self.weights[check_index(k, self.n, "k")]


@dataclass(frozen=True)
class PhaseVector:
    z: np.ndarray
    tau: float


def check_index(k, n, name="index"):
    """Return the 0-based offset for a 1-based index, or raise."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise IndexRangeError(f"{name} must be an integer, got {k!r}")
    if not 1 <= k <= n:
        raise IndexRangeError(f"{name}={k} outside 1..{n}")
    return int(k) - 1


def _check_dim(n, minimum):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < minimum:
        raise DimensionError(f"dimension must be an integer >= {minimum}, got {n!r}")
    return int(n)


def build_localized_basis(n):
    """One uniform eigenvector plus ``n - 1`` localized ones.

    Row ``M`` has ``1/sqrt(n)`` in column 1 and, for columns ``k > 1``,
    ``0`` if ``k < M``, ``(1-k)/sqrt(k(k-1))`` if ``k == M`` and
    ``1/sqrt(k(k-1))`` if ``k > M``.
    """
    n = _check_dim(n, 2)
    q = np.zeros((n, n), dtype=np.complex128)
    q[:, 0] = 1.0 / np.sqrt(n)
    for k in range(2, n + 1):
        norm = np.sqrt(k * (k - 1))
        q[: k - 1, k - 1] = 1.0 / norm
        q[k - 1, k - 1] = (1 - k) / norm
    return q


def build_plane_wave_basis(n):
    n = _check_dim(n, 1)
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def build_identity_basis(n):
    n = _check_dim(n, 1)
    return np.eye(n, dtype=np.complex128)


BASIS_BUILDERS = {
    "identity": build_identity_basis,
    "localized": build_localized_basis,
    "plane_wave": build_plane_wave_basis,
}


def validate_basis(weights, tol=DEFAULT_ORTHO_TOL):
    """Max deviation of the row and column Gram matrices from the identity."""
    w = np.asarray(weights, dtype=np.complex128)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeError(f"weights must be square, got shape {w.shape}")
    eye = np.eye(w.shape[0])
    row = float(np.max(np.abs(w @ w.conj().T - eye), initial=0.0))
    col = float(np.max(np.abs(w.conj().T @ w - eye), initial=0.0))
    return BasisReport(row, col, float(tol))


def linear_spectrum(n, j_coupling=1.0):
    """Equally spaced levels ``E_k = J (k - 1)``."""
    n = _check_dim(n, 1)
    return float(j_coupling) * np.arange(n, dtype=float)


def make_model(basis, energies=None, n=None, j_coupling=1.0, tol=DEFAULT_ORTHO_TOL):
    """Convenience constructor from a basis name (or matrix) and a spectrum.

    ``energies`` defaults to :func:`linear_spectrum` with ``j_coupling``.
    """
    if isinstance(basis, str):
        if n is None:
            raise DimensionError("n is required for a named basis")
        try:
            weights = BASIS_BUILDERS[basis](n)
        except KeyError:
            raise ValueError(f"unknown basis kind {basis!r}") from None
    else:
        weights = np.asarray(basis, dtype=np.complex128)
    if energies is None:
        energies = linear_spectrum(weights.shape[0], j_coupling)
    return SpectralModel(energies, weights, tol=tol)


def inverse_participation_ratio(model, k):
    """``c_k = sum_j |q_{k,j}|^4`` for graph state ``k``."""
    return float(np.sum(np.abs(model.row(k)) ** 4))


def ipr_localized_closed_form(n, k):
    """IPR of row ``k >= 2`` of :func:`build_localized_basis` in closed form."""
    n = _check_dim(n, 2)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise IndexRangeError(f"k must be an integer, got {k!r}")
    if k == 1:
        raise DomainError("closed form holds for k >= 2 only")
    if not 2 <= k <= n:
        raise IndexRangeError(f"k={k} outside 2..{n}")
    j = np.arange(k + 1, n + 1, dtype=float)
    tail = float(np.sum(1.0 / (j**2 * (j - 1) ** 2)))
    return 1.0 / n**2 + (1.0 - 1.0 / k) ** 2 + tail


def hamiltonian_matrix(model):
    """``H_{kl} = sum_j q_{k,j} E_j q*_{l,j}`` in the graph basis."""
    q = model.weights
    H = (q * model.energies[None, :]) @ q.conj().T
    return 0.5 * (H + H.conj().T)


def unitary_matrix(model, t):
    """``U(t)_{kl} = sum_j exp(-i E_j t) q_{k,j} q*_{l,j}``."""
    q = model.weights
    phase = np.exp(-1j * model.energies * float(t))
    return (q * phase[None, :]) @ q.conj().T


def phase_factors(model, tau):
    """Half-step phases ``z_k = exp(-i E_k tau / 2)``."""
    z = np.exp(-0.5j * model.energies * float(tau))
    z.setflags(write=False)
    return PhaseVector(z, float(tau))
