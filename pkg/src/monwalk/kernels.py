"""Backend selection for the hot loops.

The compiled Cython module is used when it is importable; otherwise the
numpy fallback is used. Setting ``MONWALK_PURE_PYTHON=1`` forces the
fallback (useful for benchmarking and for checking both paths agree).
"""

import os

from . import _pykernels

try:
    if os.environ.get("MONWALK_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure python requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

monitored_amplitudes = _impl.monitored_amplitudes
recursion_amplitudes = _impl.recursion_amplitudes
path_sum = _impl.path_sum

__all__ = [
    "BACKEND",
    "monitored_amplitudes",
    "recursion_amplitudes",
    "path_sum",
]
