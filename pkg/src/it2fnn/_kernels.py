"""Pick the compiled kernels when available, else the numpy ones.

Set ``IT2FNN_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("IT2FNN_PURE_PYTHON"):
    from it2fnn import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from it2fnn import _ext as _impl
        BACKEND = "cython"
    except ImportError:
        from it2fnn import _pykernels as _impl
        BACKEND = "python"

median_filter = _impl.median_filter
max_sq_dist = _impl.max_sq_dist
fcm_update = _impl.fcm_update

__all__ = ["BACKEND", "median_filter", "max_sq_dist", "fcm_update"]
