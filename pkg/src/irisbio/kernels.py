"""Hot-loop kernels, compiled when available.

The Cython extension ``irisbio._ckernels`` is used if it imports; otherwise
the numpy versions in ``irisbio._pykernels`` are used. Set
``IRISBIO_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("IRISBIO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"

direction_bins = _impl.direction_bins
nonmax_suppress = _impl.nonmax_suppress
hysteresis = _impl.hysteresis
hough_vote = _impl.hough_vote
box_sum3 = _impl.box_sum3
circle_means = _impl.circle_means


def backends():
    """All importable backends, keyed by name (used by tests and benchmarks)."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
