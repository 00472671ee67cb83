"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]

Both implementations are imported directly, so the comparison does not
depend on which backend ``monwalk`` selected at import time.
"""

import argparse
import time

import numpy as np

from monwalk import _pykernels, make_model, monitored_matrix, unitary_matrix
from monwalk.monitored import kernel

try:
    from monwalk import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    for n, m_max in ((10, 500), (10, 10_000), (64, 2_000)):
        model = make_model("localized", n=n)
        op = monitored_matrix(model, n // 2, 1.0)
        z = op.phases.z
        T = np.ascontiguousarray(op.matrix)
        row = np.ascontiguousarray(model.row(n // 2) * z)
        v0 = np.ascontiguousarray(model.row(1).conj() * z)
        yield (f"monitored_amplitudes n={n} m={m_max}", "monitored_amplitudes", (T, row, v0, m_max))

        U = np.ascontiguousarray(unitary_matrix(model, 1.0))
        yield (
            f"recursion_amplitudes n={n} m={m_max}",
            "recursion_amplitudes",
            (U, n // 2 - 1, np.ascontiguousarray(U[:, 0]), m_max),
        )

    for n, m in ((4, 8), (6, 7), (6, 9)):
        model = make_model("plane_wave", n=n)
        z = monitored_matrix(model, 2, 1.0).phases.z
        args = (
            np.ascontiguousarray(z * z),
            np.ascontiguousarray(model.row(2)),
            np.ascontiguousarray(kernel(model, 2)),
            np.ascontiguousarray(model.row(3).conj()),
            m,
        )
        yield (f"path_sum n={n} m={m}", "path_sum", args)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled kernels are not built; only the numpy fallback is available")
    print(f"{'case':<40} {'numpy [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for label, name, call_args in cases():
        py = best_of(lambda: getattr(_pykernels, name)(*call_args), args.repeat)
        if _kernels is None:
            print(f"{label:<40} {py * 1e3:12.3f} {'-':>14} {'-':>8}")
            continue
        cy = best_of(lambda: getattr(_kernels, name)(*call_args), args.repeat)
        print(f"{label:<40} {py * 1e3:12.3f} {cy * 1e3:14.3f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
