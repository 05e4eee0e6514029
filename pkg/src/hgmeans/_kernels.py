"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise
the NumPy fallback is used. Set ``HGMEANS_PURE_PYTHON=1`` to force the
fallback regardless of what is installed.
"""

import os

from . import _purepy

if os.environ.get("HGMEANS_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _purepy
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _purepy

BACKEND = "compiled" if _impl.__name__.endswith("_core") else "python"

nearest_center = _impl.nearest_center
nearest_two = _impl.nearest_two
centroid_sums = _impl.centroid_sums
hamerly_pass = _impl.hamerly_pass
update_min_d2 = _impl.update_min_d2
cost_of = _impl.cost_of
solve_assignment = _impl.solve_assignment


def kernel_backend():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
