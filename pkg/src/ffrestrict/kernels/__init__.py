"""Hot loops, numba-compiled by default.

Set ``FFRESTRICT_NO_NUMBA=1`` to run the pure-numpy implementations instead;
they are also selected automatically when numba cannot be imported.
"""
import os

from . import _numpy

_disabled = os.environ.get("FFRESTRICT_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError("numba disabled by FFRESTRICT_NO_NUMBA")
    from . import _numba as _active
    BACKEND = "numba"
except ImportError:
    _active = _numpy
    BACKEND = "numpy"

NAMES = (
    "pair_sum_counts",
    "rectangle_scan",
    "right_triangle_count",
    "pair_line_keys",
    "charsum",
    "plane_incidences",
    "perp_decomposition",
)


def get_backend(name: str):
    """Return the kernel module for 'numba' or 'numpy'."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba
        return _numba
    raise ValueError(f"unknown backend {name!r}")


pair_sum_counts = _active.pair_sum_counts
rectangle_scan = _active.rectangle_scan
right_triangle_count = _active.right_triangle_count
pair_line_keys = _active.pair_line_keys
charsum = _active.charsum
plane_incidences = _active.plane_incidences
perp_decomposition = _active.perp_decomposition
