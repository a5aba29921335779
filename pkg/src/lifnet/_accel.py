"""Backend switch for the hot numeric kernels.

The numba path is used when numba imports cleanly and ``LIFNET_BACKEND`` is
unset or ``numba``. ``LIFNET_BACKEND=numpy`` forces the vectorized fallback.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
_requested = os.environ.get("LIFNET_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"LIFNET_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def get_backend():
    return BACKEND


def set_backend(name):
    """Switch kernel dispatch at runtime. Returns the previous backend."""
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, BACKEND = BACKEND, name
    return previous
