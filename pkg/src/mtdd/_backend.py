"""Backend selection for the jitted kernels.

Setting the environment variable ``MTDD_FORCE_NUMPY`` to 1/true/yes/on makes
the package run on the pure-numpy kernel implementations even when numba is
installed.  The choice is made once at import time.
"""

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

_TRUTHY = {"1", "true", "yes", "on"}


def _forced_numpy() -> bool:
    return os.environ.get("MTDD_FORCE_NUMPY", "").strip().lower() in _TRUTHY


NUMBA_ENABLED = HAVE_NUMBA and not _forced_numpy()


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"
