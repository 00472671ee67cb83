"""Long-time averages of the unitary walk."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IndexRangeError
from .spectral import check_index, unitary_matrix


@dataclass(frozen=True)
class AveragedProbabilityMatrix:
    entries: np.ndarray
    degeneracy_classes: tuple


def default_deg_tol(model):
    return 1e-9 * float(np.max(np.abs(model.energies), initial=0.0))


def degeneracy_classes(energies, deg_tol):
    """Group 1-based energy indices whose levels chain within ``deg_tol``.

    Levels are sorted and consecutive ones closer than ``deg_tol`` share a
    class. Classes are returned in order of their smallest energy.
    """
    energies = np.asarray(energies, dtype=float)
    order = np.argsort(energies, kind="stable")
    classes = []
    current = [int(order[0])]
    for a, b in zip(order[:-1], order[1:]):
        if energies[b] - energies[a] <= deg_tol:
            current.append(int(b))
        else:
            classes.append(current)
            current = [int(b)]
    classes.append(current)
    return tuple(tuple(sorted(i + 1 for i in c)) for c in classes)


def _pair_average(q, classes, a, b):
    prod = q[a] * q[b].conj()
    total = 0.0
    for cls in classes:
        s = prod[[j - 1 for j in cls]].sum()
        total += s.real**2 + s.imag**2
    return total


def time_averaged_transition(model, k, k2, deg_tol=None):
    """Long-time average of ``|U(t)_{k,k2}|^2``.

    Within each class of degenerate energies the overlaps add coherently
    before squaring; with all classes singletons this is
    ``sum_j |q_{k,j}|^2 |q_{k2,j}|^2``.
    """
    a = check_index(k, model.n, "k")
    b = check_index(k2, model.n, "k2")
    if deg_tol is None:
        deg_tol = default_deg_tol(model)
    if deg_tol < 0:
        raise ValueError("deg_tol must be non-negative")
    classes = degeneracy_classes(model.energies, deg_tol)
    # symmetric by construction: |s|^2 == |conj(s)|^2 bit for bit
    lo, hi = min(a, b), max(a, b)
    return _pair_average(model.weights, classes, lo, hi)


def averaged_probability_matrix(model, deg_tol=None):
    if deg_tol is None:
        deg_tol = default_deg_tol(model)
    classes = degeneracy_classes(model.energies, deg_tol)
    n = model.n
    P = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            P[a, b] = P[b, a] = _pair_average(model.weights, classes, a, b)
    return AveragedProbabilityMatrix(P, classes)


def ue_transition_closed_form(n, k, l):
    """Averaged transition between localized states ``2 <= k < l <= n``.

    Arguments are swapped if ``k > l``. For ``l == n`` the value is ``2/n^2``.
    """
    if k > l:
        k, l = l, k
    if k == l:
        raise DomainError("diagonal entries are given by the IPR")
    if k == 1:
        raise DomainError("transitions from or to state 1 are not covered")
    if not 2 <= k < l <= n:
        raise IndexRangeError(f"need 2 <= k < l <= n, got k={k}, l={l}, n={n}")
    if l == n:
        return 2.0 / n**2
    j = np.arange(l + 1, n + 1, dtype=float)
    return 1.0 / n**2 + 1.0 / l**2 + float(np.sum(1.0 / (j**2 * (j - 1) ** 2)))


def detailed_balance_residual(model, t):
    """``max_j |sum_k U(t)_{jk} - 1|``."""
    U = unitary_matrix(model, t)
    return float(np.max(np.abs(U.sum(axis=1) - 1.0)))
