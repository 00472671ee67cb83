"""Batch execution of an :class:`~monwalk.config.ExperimentConfig`."""

import hashlib
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError
from .errors import BasisError, NumericalError
from .kernels import BACKEND
from .monitored import (
    amplitude_matrix_power,
    amplitude_projected,
    amplitude_recursion,
    detect_eos,
    eigenvalues,
    equivalence_classes,
    monitored_matrix,
    path_sum_series,
    stationary_states,
)
from .observables import detect_mf, transition_stats
from .spectral import (
    BASIS_BUILDERS,
    SpectralModel,
    inverse_participation_ratio,
    ipr_localized_closed_form,
    linear_spectrum,
    validate_basis,
)
from .unitary_avg import averaged_probability_matrix, ue_transition_closed_form

log = logging.getLogger(__name__)

UNDEF = "undef"
VERIFY_PATH_TERMS = 10**5


class OutputError(OSError):
    pass


class VerificationError(NumericalError):
    pass


def fmt(x):
    """Shortest round-trip decimal for a finite float."""
    x = float(x)
    if not math.isfinite(x):
        raise NumericalError(f"non-finite value {x!r} in output")
    if x == 0.0:
        return "0.0"
    return repr(x)


def fmt_optional(x):
    return fmt(x) if math.isfinite(x) else UNDEF


def load_matrix(path):
    path = Path(path)
    try:
        if path.suffix == ".npy":
            return np.load(path)
        return np.loadtxt(path, dtype=complex, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError("/basis/custom", f"cannot read matrix: {exc}") from None


def build_model(cfg):
    if cfg.basis == "custom":
        weights = np.asarray(load_matrix(cfg.custom_basis_path), dtype=np.complex128)
        if weights.shape != (cfg.n, cfg.n):
            raise ConfigError(
                "/basis/custom", f"matrix shape {weights.shape} != ({cfg.n}, {cfg.n})"
            )
    else:
        weights = BASIS_BUILDERS[cfg.basis](cfg.n)
    report = validate_basis(weights, cfg.tolerances.orthonormality)
    if not report.passed:
        raise BasisError(
            f"basis not orthonormal: row residual {report.row_residual:.3g}, "
            f"column residual {report.col_residual:.3g}",
            report,
        )
    if cfg.energies is None:
        energies = linear_spectrum(cfg.n, cfg.j_coupling)
    else:
        energies = np.array(cfg.energies)
    return SpectralModel(energies, weights, tol=None)


def _with_suffix(path, parts):
    if not parts:
        return path
    return path.with_name(path.stem + "_" + "_".join(parts) + path.suffix)


class Run:
    def __init__(self, cfg, out_dir, threads=1):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.threads = max(1, int(threads))
        self.model = build_model(cfg)
        self._series = {}
        self.written = []
        self.timings = {}

    # -- amplitude cache -------------------------------------------------
    def series(self, tau_i, M, Mp):
        return self._series[(tau_i, M, Mp)]

    def compute_series(self, pairs):
        todo = [p for p in pairs if p not in self._series]
        taus = self.cfg.taus

        def one(key):
            tau_i, M, Mp = key
            return amplitude_matrix_power(self.model, M, Mp, taus[tau_i], self.cfg.m_max)

        if self.threads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(one, todo))
        else:
            results = [one(k) for k in todo]
        self._series.update(zip(todo, results))

    # -- file handling ---------------------------------------------------
    def _target(self, path, tau_i=None, extra=()):
        parts = []
        if tau_i is not None and len(self.cfg.j_tau) > 1:
            parts.append(f"jt{tau_i + 1}")
        parts.extend(extra)
        p = Path(path)
        if not p.is_absolute():
            p = self.out_dir / p
        return _with_suffix(p, parts)

    def _write(self, kind, target, text):
        data = text.encode()
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
        except OSError as exc:
            raise OutputError(f"cannot write {target}: {exc}") from exc
        self.written.append(
            {"kind": kind, "path": str(target), "sha256": hashlib.sha256(data).hexdigest()}
        )

    @staticmethod
    def _csv(header, rows):
        buf = io.StringIO()
        buf.write(header + "\n")
        for row in rows:
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    # -- emitters --------------------------------------------------------
    def emit_probability_map(self, output):
        cfg = self.cfg
        for ti in range(len(cfg.taus)):
            pairs = [(ti, M, Mp) for M in cfg.measured for Mp in cfg.initial]
            self.compute_series(pairs)
            rows = (
                (str(M), str(Mp), fmt(np.sum(self.series(ti, M, Mp).probs)))
                for _, M, Mp in pairs
            )
            self._write(output.kind, self._target(output.path, ti), self._csv("M,Mp,total_prob", rows))

    def emit_amplitude_series(self, output):
        cfg = self.cfg
        multi = len(cfg.measured) * len(cfg.initial) > 1
        for ti in range(len(cfg.taus)):
            pairs = [(ti, M, Mp) for M in cfg.measured for Mp in cfg.initial]
            self.compute_series(pairs)
            for _, M, Mp in pairs:
                s = self.series(ti, M, Mp)
                st = transition_stats(s)
                rows = (
                    (
                        str(m + 1),
                        fmt(s.values[m].real),
                        fmt(s.values[m].imag),
                        fmt(st.probs[m]),
                        fmt(st.cumulative[m]),
                        fmt_optional(st.mtt_curve[m]),
                    )
                    for m in range(len(s))
                )
                extra = (f"M{M}", f"Mp{Mp}") if multi else ()
                self._write(
                    output.kind,
                    self._target(output.path, ti, extra),
                    self._csv("m,re,im,prob,cum_prob,mtt", rows),
                )

    def emit_mtt_curve(self, output):
        cfg = self.cfg
        multi = len(cfg.measured) > 1
        for ti in range(len(cfg.taus)):
            pairs = [(ti, M, Mp) for M in cfg.measured for Mp in cfg.initial]
            self.compute_series(pairs)
            for M in cfg.measured:
                rows = []
                for Mp in cfg.initial:
                    st = transition_stats(self.series(ti, M, Mp))
                    rows.extend(
                        (str(M), str(Mp), str(c + 1), fmt_optional(st.mtt_curve[c]))
                        for c in range(st.horizon)
                    )
                extra = (f"M{M}",) if multi else ()
                self._write(
                    output.kind, self._target(output.path, ti, extra), self._csv("M,Mp,cutoff,mtt", rows)
                )

    def emit_eigenvalues(self, output):
        cfg = self.cfg
        multi = len(cfg.measured) > 1
        for ti, tau in enumerate(cfg.taus):
            for M in cfg.measured:
                lam = eigenvalues(monitored_matrix(self.model, M, tau))
                rows = (
                    (str(k), fmt(v.real), fmt(v.imag), fmt(abs(v)))
                    for k, v in enumerate(lam, start=1)
                )
                extra = (f"M{M}",) if multi else ()
                self._write(
                    output.kind, self._target(output.path, ti, extra), self._csv("k,re,im,modulus", rows)
                )

    def emit_unitary_avg(self, output):
        P = averaged_probability_matrix(self.model, self.cfg.tolerances.degeneracy).entries
        n = self.cfg.n
        rows = (
            (str(k), str(l), fmt(P[k - 1, l - 1]))
            for k in range(1, n + 1)
            for l in range(1, n + 1)
        )
        self._write(output.kind, self._target(output.path), self._csv("k,l,p_bar", rows))

    def emit_ipr(self, output):
        rows = (
            (str(k), fmt(inverse_participation_ratio(self.model, k)))
            for k in range(1, self.cfg.n + 1)
        )
        self._write(output.kind, self._target(output.path), self._csv("k,c_k", rows))

    def diagnostics(self):
        cfg, model = self.cfg, self.model
        tol = cfg.tolerances
        report = validate_basis(model.weights, tol.orthonormality)
        out = {
            "basis": {
                "kind": cfg.basis,
                "row_residual": report.row_residual,
                "col_residual": report.col_residual,
            },
            "closed_form": self.closed_form_residuals(),
            "runs": [],
        }
        for ti, tau in enumerate(cfg.taus):
            pairs = [(ti, M, Mp) for M in cfg.measured for Mp in cfg.initial]
            self.compute_series(pairs)
            per_m = []
            for M in cfg.measured:
                eos = detect_eos(model, M, tol.eos)
                mf = {
                    str(Mp): detect_mf(transition_stats(self.series(ti, M, Mp)), tol.tail)
                    for Mp in cfg.initial
                }
                per_m.append(
                    {
                        "measured": M,
                        "eos": sorted(eos.indices),
                        "stationary": sorted(stationary_states(model, M, tau, tol.eos)),
                        "equivalence_classes": [
                            list(c) for c in equivalence_classes(model, M, tau, eos_tol=tol.eos)
                        ],
                        "mf": mf,
                        "mf_horizon": cfg.m_max,
                    }
                )
            out["runs"].append({"j_tau": cfg.j_tau[ti], "tau": tau, "measured": per_m})
        return out

    def emit_diagnostics(self, output):
        text = json.dumps(self.diagnostics(), indent=2, sort_keys=True) + "\n"
        self._write(output.kind, self._target(output.path), text)

    # -- verification ----------------------------------------------------
    def closed_form_residuals(self):
        """Differences between numerics and closed forms (localized basis only)."""
        if self.cfg.basis != "localized" or self.cfg.n < 2:
            return {}
        n = self.cfg.n
        ipr = max(
            abs(inverse_participation_ratio(self.model, k) - ipr_localized_closed_form(n, k))
            for k in range(2, n + 1)
        )
        P = averaged_probability_matrix(self.model, self.cfg.tolerances.degeneracy).entries
        pairs = [(k, l) for k in range(2, n + 1) for l in range(k + 1, n + 1)]
        ue = max(
            (abs(P[k - 1, l - 1] - ue_transition_closed_form(n, k, l)) for k, l in pairs),
            default=0.0,
        )
        return {"ipr_max_residual": ipr, "unitary_avg_max_residual": ue}

    def verify(self):
        """Cross-check amplitudes three ways and the closed forms; raise on failure."""
        cfg, model = self.cfg, self.model
        n = cfg.n
        failures = []
        agree_tol = 1e-10 if n <= 6 else 1e-9
        m_check = min(cfg.m_max, 50)
        m_path = 0
        while m_path < min(cfg.m_max, 10) and n ** (m_path + 1) <= VERIFY_PATH_TERMS:
            m_path += 1
        for ti, tau in enumerate(cfg.taus):
            for M in cfg.measured:
                for Mp in cfg.initial:
                    a = amplitude_matrix_power(model, M, Mp, tau, m_check).values
                    b = amplitude_recursion(model, M, Mp, tau, m_check).values
                    c = amplitude_projected(model, M, Mp, tau, m_check, cfg.tolerances.eos).values
                    d = np.max(np.abs(a - b))
                    if d > agree_tol:
                        failures.append(f"jt{ti + 1} ({M},{Mp}): recursion differs by {d:.3g}")
                    d = np.max(np.abs(a - c))
                    if d > 1e-10:
                        failures.append(f"jt{ti + 1} ({M},{Mp}): projection differs by {d:.3g}")
                    if m_path:
                        p = path_sum_series(model, M, Mp, tau, m_path).values
                        d = np.max(np.abs(a[:m_path] - p))
                        if d > agree_tol:
                            failures.append(f"jt{ti + 1} ({M},{Mp}): path sum differs by {d:.3g}")
        for name, value in self.closed_form_residuals().items():
            if value > 1e-12:
                failures.append(f"{name} = {value:.3g}")
        if failures:
            raise VerificationError("verification failed: " + "; ".join(failures[:10]))
        return {"checked_pairs": len(cfg.measured) * len(cfg.initial) * len(cfg.taus),
                "m_checked": m_check, "path_sum_m": m_path}

    # -- driver ----------------------------------------------------------
    def execute(self, verify=False):
        t0 = time.perf_counter()
        if verify:
            self.timings["verify"] = -time.perf_counter()
            self.verify_report = self.verify()
            self.timings["verify"] += time.perf_counter()
        for output in self.cfg.outputs:
            t = time.perf_counter()
            getattr(self, f"emit_{output.kind}")(output)
            self.timings[output.kind] = self.timings.get(output.kind, 0.0) + time.perf_counter() - t
        self.timings["total"] = time.perf_counter() - t0
        manifest = {
            "config": self.cfg.raw,
            "version": __version__,
            "backend": BACKEND,
            "verified": bool(verify),
            "outputs": self.written,
            "timings_s": self.timings,
        }
        target = self.out_dir / "manifest.json"
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise OutputError(f"cannot write {target}: {exc}") from exc
        return manifest
