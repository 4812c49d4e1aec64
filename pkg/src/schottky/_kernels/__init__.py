"""Orbit kernels: compiled core when available, numpy fallback otherwise.

Set ``SCHOTTKY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("SCHOTTKY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

circle_images = _impl.circle_images
spherical_diameters = _impl.spherical_diameters
small_caps = _impl.small_caps
attracting_fixed_points = _impl.attracting_fixed_points
word_tree = _impl.word_tree
level_stats = _impl.level_stats
census = _impl.census


def backends():
    """Available implementations keyed by name (used by tests and benchmarks)."""
    out = {"python": _fallback}
    try:
        from . import _core

        out["cython"] = _core
    except ImportError:
        pass
    return out
