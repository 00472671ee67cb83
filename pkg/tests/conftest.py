import numpy as np
import pytest
import scipy.linalg

from monwalk import make_model


@pytest.fixture
def loc10():
    return make_model("localized", n=10)


@pytest.fixture
def pw10():
    return make_model("plane_wave", n=10)


@pytest.fixture
def id10():
    return make_model("identity", n=10)


def random_model(rng, n, degenerate=False):
    """Random unitary weights (QR of a complex Gaussian) with sorted energies."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    q = q * (np.diag(r) / np.abs(np.diag(r)))[None, :]
    energies = np.sort(rng.uniform(0.0, 3.0, size=n))
    if degenerate and n > 1:
        energies[1] = energies[0]
    return make_model(q, energies=energies)


def site_basis_amplitudes(model, M, Mp, tau, m_max):
    """Brute-force oracle: evolve in the graph basis with expm and an explicit projector."""
    q = model.weights
    H = q @ np.diag(model.energies) @ q.conj().T
    U = scipy.linalg.expm(-1j * tau * H)
    P = np.eye(model.n)
    P[M - 1, M - 1] = 0.0
    psi = U[:, Mp - 1].copy()
    out = []
    for _ in range(m_max):
        out.append(psi[M - 1])
        psi = U @ (P @ psi)
    return np.array(out)


ACCEPTANCE_LINES = []


def report(label, ok, detail):
    """Record and print one acceptance line, then fail the test if ``ok`` is false."""
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
