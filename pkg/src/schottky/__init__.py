"""Classical Schottky groups from (truncated) infinite circle configurations.

Modules: :mod:`~schottky.moebius` (maps, circles, pairings),
:mod:`~schottky.config` (systems, families, admissibility),
:mod:`~schottky.orbit` (Cayley-tree enumeration and diagnostics),
:mod:`~schottky.construct` (named constructions), :mod:`~schottky.qcmod`
(moduli and collar maps) and :mod:`~schottky.cli`.
"""

__version__ = "0.1.0"

from .config import (  # noqa: E402
    CirclePair,
    CircleSystem,
    ConjugatedFamily,
    FamilySpec,
    TailFamily,
    accumulation_points,
    check_star,
    handlebody_summary,
    validate,
)
from .errors import SchottkyError  # noqa: E402
from .moebius import INF, Moebius, OrientedCircle, pair_circles  # noqa: E402

__all__ = [
    "INF",
    "CirclePair",
    "CircleSystem",
    "ConjugatedFamily",
    "FamilySpec",
    "Moebius",
    "OrientedCircle",
    "SchottkyError",
    "TailFamily",
    "accumulation_points",
    "check_star",
    "handlebody_summary",
    "pair_circles",
    "validate",
]
