"""Classical quantities derived from monitored amplitudes."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .monitored import amplitude_matrix_power, equivalence_classes

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class TransitionStats:
    """Probabilities, running sums and the mean-transition-time curve.

    ``mtt_curve[i]`` is the mean transition time (in units of time, i.e.
    already multiplied by ``tau``) using the first ``i + 1`` measurements.
    Entries where the accumulated probability is below the underflow
    threshold are ``nan`` and flagged ``False`` in ``defined``.
    """

    probs: np.ndarray
    cumulative: np.ndarray
    mtt_curve: np.ndarray
    defined: np.ndarray
    tau: float
    mf: int | None = None

    @property
    def horizon(self):
        return len(self.probs)


@dataclass(frozen=True)
class ProbabilityMap:
    grid: np.ndarray
    m_max: int
    tau: float


def transition_stats(series):
    if len(series) == 0:
        raise ValueError("empty amplitude series")
    probs = np.abs(series.values) ** 2
    cumulative = np.cumsum(probs)
    weighted = np.cumsum(np.arange(len(probs)) * probs)
    defined = cumulative > UNDERFLOW
    mtt = np.full(len(probs), np.nan)
    mtt[defined] = series.tau * weighted[defined] / cumulative[defined]
    return TransitionStats(probs, cumulative, mtt, defined, series.tau)


def detect_mf(stats, tail_tol=1e-10):
    """Last measurement index that still carries weight, relative to the horizon.

    Returns the smallest ``m`` such that every later amplitude satisfies
    ``|phi| <= tail_tol`` and their total probability is ``<= tail_tol``.
    ``None`` means the series has not died out by the end of the horizon.
    """
    probs = stats.probs
    amps = np.sqrt(probs)
    if amps[-1] > tail_tol:
        return None
    # tail[i] = sum of probs strictly after position i
    tail = np.concatenate((np.cumsum(probs[::-1])[::-1][1:], [0.0]))
    big_after = np.concatenate(
        (np.maximum.accumulate(amps[::-1])[::-1][1:], [0.0])
    )
    ok = (tail <= tail_tol) & (big_after <= tail_tol)
    return int(np.argmax(ok)) + 1


def _series_for(model, tau, m_max, pairs, threads):
    def one(pair):
        M, Mp = pair
        return amplitude_matrix_power(model, M, Mp, tau, m_max)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, pairs))
    return [one(p) for p in pairs]


def _all_series(model, tau, m_max, threads=1, use_equivalence=False):
    """Series for every (M, M'), measured-index-major, as a nested list."""
    n = model.n
    pairs = []
    alias = {}
    for M in range(1, n + 1):
        if use_equivalence:
            for cls in equivalence_classes(model, M, tau):
                rep = cls[0]
                pairs.append((M, rep))
                for Mp in cls:
                    alias[(M, Mp)] = (M, rep)
        else:
            pairs.extend((M, Mp) for Mp in range(1, n + 1))
    computed = dict(zip(pairs, _series_for(model, tau, m_max, pairs, threads)))
    out = []
    for M in range(1, n + 1):
        out.append([computed[alias.get((M, Mp), (M, Mp))] for Mp in range(1, n + 1)])
    return out


def probability_map(model, tau, m_max, threads=1, use_equivalence=False):
    """``grid[M-1, M'-1] = sum_{m <= m_max} |phi_{M M'}(m)|^2``.

    With ``use_equivalence`` the initial states that provably share a series
    are computed once.
    """
    series = _all_series(model, tau, m_max, threads, use_equivalence)
    grid = np.array([[np.sum(s.probs) for s in row] for row in series])
    return ProbabilityMap(grid, int(m_max), float(tau))


def mtt_matrix(model, tau, m_max, threads=1):
    """Mean transition times at the full horizon; ``nan`` where undefined."""
    series = _all_series(model, tau, m_max, threads)
    return np.array(
        [[transition_stats(s).mtt_curve[-1] for s in row] for row in series]
    )
