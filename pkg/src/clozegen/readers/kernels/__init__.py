"""GRU sequence kernels: compiled Cython core with a numpy fallback.

Both backends implement the same ``gru_forward`` / ``gru_backward`` pair;
the compiled one is preferred when the extension was built. Set the
environment variable ``CLOZEGEN_FORCE_NUMPY_KERNEL=1`` to force the
fallback (useful for the benchmark and for debugging).
"""

import os

from . import gru_numpy

_impl = gru_numpy
BACKEND = "numpy"

if not os.environ.get("CLOZEGEN_FORCE_NUMPY_KERNEL"):
    try:
        from . import _gru_cy as _impl  # type: ignore
        BACKEND = "cython"
    except ImportError:
        pass

gru_forward = _impl.gru_forward
gru_backward = _impl.gru_backward


def available_backends():
    """Name -> module map of importable kernel backends."""
    out = {"numpy": gru_numpy}
    try:
        from . import _gru_cy
        out["cython"] = _gru_cy
    except ImportError:
        pass
    return out
