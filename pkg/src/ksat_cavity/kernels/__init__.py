"""Hot numeric kernels with two interchangeable backends.

The default backend compiles the kernels with numba; a pure-numpy
fallback provides the same functions without compilation.  Selection is
controlled by the environment variable ``KSAT_CAVITY_BACKEND``:

* unset or ``auto`` -- numba if importable, else numpy;
* ``numba`` -- require the compiled backend;
* ``numpy`` -- force the vectorized fallback.

Both backends operate on plain ndarrays and agree to floating-point
rounding; the integer-valued ``violation_counts`` agrees exactly.
"""

import os

__all__ = [
    "BACKEND",
    "cavity_fields",
    "violation_counts",
    "gibbs_sums",
    "get_backend",
    "set_threads",
]


def get_backend(name):
    """Import and return a backend module by name ('numba' or 'numpy')."""
    if name == "numpy":
        from . import numpy_backend

        return numpy_backend
    if name == "numba":
        from . import numba_backend

        return numba_backend
    raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")


_requested = os.environ.get("KSAT_CAVITY_BACKEND", "auto").strip().lower() or "auto"
if _requested == "auto":
    try:
        _active = get_backend("numba")
        BACKEND = "numba"
    except ImportError:
        _active = get_backend("numpy")
        BACKEND = "numpy"
elif _requested in ("numba", "numpy"):
    _active = get_backend(_requested)
    BACKEND = _requested
else:
    raise ValueError(
        f"KSAT_CAVITY_BACKEND={_requested!r} not recognized; use 'numba' or 'numpy'"
    )

cavity_fields = _active.cavity_fields
violation_counts = _active.violation_counts
gibbs_sums = _active.gibbs_sums


def set_threads(n):
    """Cap kernel parallelism; results are identical for any value.

    Only the numba backend is multithreaded (the parallel unit loop in
    ``cavity_fields``); the numpy fallback ignores the setting.
    """
    if n is None:
        return
    if n < 1:
        raise ValueError("thread count must be >= 1")
    if BACKEND == "numba":
        import numba

        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))
