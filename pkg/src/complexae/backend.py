"""Kernel backend selection.

The hot elementwise kernels in :mod:`complexae.kernels` exist twice: a
numba ``@njit`` version and a pure-numpy version.  Which one the package
uses is decided once, at import time, from the ``COMPLEXAE_BACKEND``
environment variable:

* ``numba``  - require numba (ImportError if it is missing),
* ``numpy``  - force the pure-numpy fallback,
* ``auto``   - use numba when importable, numpy otherwise (the default).

Matrix products are numpy ``@`` (BLAS) under both backends; numba's ``@``
lowers to the same BLAS so there is nothing to gain from jitting those.
"""

import os

_ENV_VAR = "COMPLEXAE_BACKEND"


def _resolve() -> bool:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return False
    return True


USE_NUMBA = _resolve()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
