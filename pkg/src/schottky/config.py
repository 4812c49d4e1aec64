"""Circle systems, infinite families, admissibility checks, and end data.

Infinite configurations are described by a :class:`FamilySpec` and
materialized at a finite truncation radius on demand; every group level
computation runs on the resulting finite :class:`CircleSystem`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import NotAdmissible
from .moebius import (
    GEOMETRY_TOL,
    INF,
    Moebius,
    OrientedCircle,
    apply_circle,
    apply_point,
    chordal_circle_deviation,
    chordal_distance,
    classify,
    fixed_points,
    pair_circles,
)

DEDUP_TOL = 1e-9


def power(g: Moebius, n: int) -> Moebius:
    """``g**n`` by repeated squaring (negative ``n`` uses the inverse)."""
    if n < 0:
        g, n = g.inverse(), -n
    out = Moebius.identity()
    while n:
        if n & 1:
            out = out @ g
        g = g @ g
        n >>= 1
    return out


@dataclass(frozen=True)
class CirclePair:
    """``(C_i, C_i', g_i)`` with ``g_i(Ext C_i) = Int C_i'``."""

    c: OrientedCircle
    c_prime: OrientedCircle
    map: Moebius
    label: int = 0

    @classmethod
    def canonical(cls, c, c_prime, twist=0.0, label=0) -> "CirclePair":
        return cls(c, c_prime, pair_circles(c, c_prime, twist), label)

    def transformed(self, m: Moebius) -> "CirclePair":
        """Image under ``m`` with the map conjugated to match."""
        return CirclePair(
            apply_circle(m, self.c), apply_circle(m, self.c_prime), self.map.conj_by(m), self.label
        )


@dataclass(frozen=True)
class CircleSystem:
    pairs: tuple[CirclePair, ...]
    provenance: "FamilySpec | None" = None

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self):
        return len(self.pairs)

    @property
    def k(self) -> int:
        return len(self.pairs)

    def circles(self) -> list[OrientedCircle]:
        out = []
        for p in self.pairs:
            out.extend((p.c, p.c_prime))
        return out

    def circle_ids(self) -> list[tuple[int, str]]:
        out = []
        for i in range(len(self.pairs)):
            out.extend(((i + 1, "C"), (i + 1, "C'")))
        return out

    def generators(self) -> list[Moebius]:
        """Symmetric generators in letter order ``g1, g1^-1, g2, g2^-1, ...``."""
        out = []
        for p in self.pairs:
            out.extend((p.map, p.map.inverse()))
        return out

    def letter_circles(self) -> list[OrientedCircle]:
        """Circle crossed by the Cayley-tree edge of each letter.

        ``g_i D`` lies inside ``C_i'`` and ``g_i^-1 D`` inside ``C_i``.
        """
        out = []
        for p in self.pairs:
            out.extend((p.c_prime, p.c))
        return out

    def transformed(self, m: Moebius) -> "CircleSystem":
        return CircleSystem(tuple(p.transformed(m) for p in self.pairs))

    def relabeled(self) -> "CircleSystem":
        return CircleSystem(
            tuple(replace(p, label=i + 1) for i, p in enumerate(self.pairs)), self.provenance
        )


@dataclass(frozen=True)
class ConjugatedFamily:
    """Pairs ``C_n = h^n C``, ``C_n' = h^n C'``, ``g_n = h^n g h^-n``.

    With ``prime_conjugator`` set, ``C_n' = k^n C'`` instead and each map is
    the canonical pairing of the translated circles.
    """

    base: CirclePair
    conjugator: Moebius
    prime_conjugator: Moebius | None = None

    def pair(self, n: int) -> CirclePair:
        hn = power(self.conjugator, n)
        c = apply_circle(hn, self.base.c)
        if self.prime_conjugator is None:
            return CirclePair(c, apply_circle(hn, self.base.c_prime), self.base.map.conj_by(hn))
        cp = apply_circle(power(self.prime_conjugator, n), self.base.c_prime)
        return CirclePair.canonical(c, cp)

    def accumulation(self) -> list:
        pts = list(fixed_points(self.conjugator))
        if self.prime_conjugator is not None:
            pts.extend(fixed_points(self.prime_conjugator))
        return pts


@dataclass(frozen=True)
class TailFamily:
    """One-sided geometric tail converging to ``point``.

    ``C_n`` has center ``point + u s 4^-n`` and ``C_n'`` center
    ``point + 2 u s 4^-n``, both of radius ``s 4^-n / 4``, where ``u`` is the
    unit ``direction`` and ``s`` the ``scale``.  Consecutive blocks are
    disjoint and the configuration is self-similar, so plane distances stay
    bounded below.
    """

    point: complex
    direction: complex = 1.0
    scale: float = 1.0
    twist: float = 0.0

    def __post_init__(self):
        u = complex(self.direction)
        if abs(u) == 0:
            raise ValueError("tail direction must be non-zero")
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "direction", u / abs(u))
        object.__setattr__(self, "scale", float(self.scale))

    def pair(self, n: int) -> CirclePair:
        if n < 0:
            raise ValueError("tail families are indexed by n >= 0")
        step = self.scale * 4.0 ** (-n)
        c = OrientedCircle(self.point + self.direction * step, step / 4.0)
        cp = OrientedCircle(self.point + 2.0 * self.direction * step, step / 4.0)
        return CirclePair.canonical(c, cp, self.twist)


@dataclass(frozen=True)
class FamilySpec:
    families: tuple[ConjugatedFamily, ...] = ()
    explicit: tuple[CirclePair, ...] = ()
    tails: tuple[TailFamily, ...] = ()
    radius: int = 2
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "explicit", tuple(self.explicit))
        object.__setattr__(self, "tails", tuple(self.tails))

    @property
    def is_infinite(self) -> bool:
        return bool(self.families or self.tails)

    def family_pairs(self, j: int, N: int) -> list[CirclePair]:
        return [self.families[j].pair(n) for n in range(-N, N + 1)]

    def tail_pairs(self, j: int, N: int) -> list[CirclePair]:
        return [self.tails[j].pair(n) for n in range(0, N + 1)]

    def materialize(self, N: int | None = None) -> CircleSystem:
        """Finite truncation: families over ``n in [-N, N]``, tails over ``[0, N]``."""
        N = self.radius if N is None else N
        if N < 0:
            raise ValueError("truncation radius must be >= 0")
        pairs = list(self.explicit)
        for j in range(len(self.families)):
            pairs.extend(self.family_pairs(j, N))
        for j in range(len(self.tails)):
            pairs.extend(self.tail_pairs(j, N))
        return CircleSystem(tuple(pairs), provenance=self).relabeled()


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple
    value: float


@dataclass(frozen=True)
class ValidationReport:
    admissible: bool
    violations: tuple[Violation, ...]
    min_pair_gap: float
    min_plane_distance: float
    purely_loxodromic: bool

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "purely_loxodromic": self.purely_loxodromic,
            "min_pair_gap": self.min_pair_gap,
            "min_plane_distance": self.min_plane_distance,
            "violations": [
                {"kind": v.kind, "indices": [list(i) for i in v.indices], "value": v.value}
                for v in self.violations
            ],
        }


def _pairwise(centers: np.ndarray, radii: np.ndarray):
    d = np.abs(centers[:, None] - centers[None, :])
    rs = radii[:, None] + radii[None, :]
    gap = d - rs
    inv = ((d - rs) * (d + rs) + 2.0 * radii[:, None] * radii[None, :]) / (
        2.0 * radii[:, None] * radii[None, :]
    )
    return gap, inv


def validate(sys: CircleSystem) -> ValidationReport:
    """Check the finite admissibility conditions; never raises on bad input.

    * all closed discs pairwise disjoint (so none contains another and
      infinity lies in the common exterior);
    * each map sends ``C_i`` onto ``C_i'`` with ``g_i(inf)`` inside ``C_i'``,
      which forces ``g_i(Ext C_i) = Int C_i'``;
    * each map is loxodromic.
    """
    circles = sys.circles()
    ids = sys.circle_ids()
    violations: list[Violation] = []
    if not circles:
        return ValidationReport(True, (), math.inf, math.inf, True)
    centers = np.array([c.center for c in circles])
    radii = np.array([c.radius for c in circles])
    gap, inv = _pairwise(centers, radii)
    iu, ju = np.triu_indices(len(circles), k=1)
    gaps = gap[iu, ju]
    invs = inv[iu, ju]
    for i, j, g, v in zip(iu, ju, gaps, invs):
        if v <= -1.0 - GEOMETRY_TOL:
            violations.append(Violation("nested", (ids[i], ids[j]), float(g)))
        elif v <= 1.0 + GEOMETRY_TOL:
            violations.append(Violation("overlap", (ids[i], ids[j]), float(g)))
    min_gap = float(gaps.min()) if gaps.size else math.inf
    disjoint = not violations
    if gaps.size and disjoint:
        min_plane = float(np.arccosh(invs.min()))
    else:
        min_plane = math.inf if not gaps.size else 0.0

    lox = True
    for idx, p in enumerate(sys.pairs):
        label = (idx + 1,)
        if not classify(p.map).is_loxodromic:
            lox = False
            violations.append(Violation("not_loxodromic", (label,), float(abs(p.map.trace) ** 2)))
        try:
            image = apply_circle(p.map, p.c)
            dev = chordal_circle_deviation(image, p.c_prime)
        except Exception:
            dev = math.inf
        inside = p.c_prime.contains(apply_point(p.map, INF))
        if dev > GEOMETRY_TOL or not inside:
            violations.append(Violation("pairing", (label,), float(dev)))

    violations.sort(key=lambda v: (v.indices, v.kind))
    return ValidationReport(not violations, tuple(violations), min_gap, min_plane, lox)


def _sort_key(z):
    return (1, 0.0, 0.0) if z is INF else (0, z.real, z.imag)


def dedup_points(points: Sequence, tol: float = DEDUP_TOL) -> list:
    out: list = []
    # adding 0.0 clears negative zeros so reports print cleanly
    points = [z if z is INF else complex(z) + 0.0 for z in points]
    for z in sorted(points, key=_sort_key):
        if not any(chordal_distance(z, w) <= tol for w in out):
            out.append(z)
    return out


def accumulation_points(fam: FamilySpec) -> list:
    """Accumulation set of the full infinite family.

    Fixed points of each conjugator plus each tail's limit point; a purely
    explicit (finite) spec accumulates nowhere.
    """
    pts: list = []
    for f in fam.families:
        pts.extend(f.accumulation())
    for t in fam.tails:
        pts.append(t.point)
    return dedup_points(pts)


def circle_point_distance(c: OrientedCircle, x, samples: int = 32) -> float:
    """Largest chordal distance from ``x`` to sampled points of ``c``."""
    return max(chordal_distance(complex(z), x) for z in c.points(samples))


@dataclass(frozen=True)
class StarReport:
    passed: bool
    witnesses: tuple
    checked: int

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "witnesses": [dict(w) for w in self.witnesses],
        }


def _nearest(points, z):
    return min(points, key=lambda p: chordal_distance(p, z))


def _star_sequence(pairs: list[CirclePair], targets: list, where: dict) -> list:
    """Witnesses where a tail sequence fails to converge as a pair to one point."""
    bad = []
    x = _nearest(targets, pairs[-1].c.center)
    sep = [chordal_circle_deviation(p.c, p.c_prime) for p in pairs]
    dc = [circle_point_distance(p.c, x) for p in pairs]
    dp = [circle_point_distance(p.c_prime, x) for p in pairs]
    for n in range(1, len(pairs)):
        if not (sep[n] < sep[n - 1] and dc[n] < dc[n - 1] and dp[n] < dp[n - 1]):
            bad.append(dict(where, n=n, separation=sep[n], distance_c=dc[n], distance_c_prime=dp[n]))
    return bad


def check_star(fam: FamilySpec, depth: int) -> StarReport:
    """Check that paired circles converge to the same point along every tail.

    For each conjugated family both ends ``n -> +depth`` and ``n -> -depth``
    are examined, and each one-sided tail is followed to ``n = depth``.  A
    sequence passes when the separation of ``C_n`` from ``C_n'`` and both
    circles' distance to the common limit decrease strictly.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    witnesses: list = []
    checked = 0
    for j, f in enumerate(fam.families):
        targets = f.accumulation()
        for sign in (1, -1):
            seq = [f.pair(sign * n) for n in range(depth + 1)]
            witnesses.extend(_star_sequence(seq, targets, {"family": j, "direction": sign}))
            checked += 1
    for j, t in enumerate(fam.tails):
        seq = [t.pair(n) for n in range(depth + 1)]
        witnesses.extend(_star_sequence(seq, [t.point], {"tail": j, "direction": 1}))
        checked += 1
    return StarReport(not witnesses, tuple(witnesses), checked)


INFINITE_GENUS = "infinity"


@dataclass(frozen=True)
class HandlebodySummary:
    genus: int | str
    end_count_at_truncation: int
    accumulation: tuple

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "end_count_at_truncation": self.end_count_at_truncation,
            "accumulation": list(self.accumulation),
        }


def handlebody_summary(obj: CircleSystem | FamilySpec) -> HandlebodySummary:
    """Genus and end data of the handlebody uniformized by the configuration."""
    if isinstance(obj, FamilySpec):
        report = validate(obj.materialize())
        if not report.admissible:
            raise NotAdmissible(f"truncation has {len(report.violations)} violation(s)")
        acc = tuple(accumulation_points(obj))
        genus = INFINITE_GENUS if obj.is_infinite else len(obj.explicit)
        return HandlebodySummary(genus, len(acc), acc)
    report = validate(obj)
    if not report.admissible:
        raise NotAdmissible(f"system has {len(report.violations)} violation(s)")
    if obj.provenance is not None and obj.provenance.is_infinite:
        acc = tuple(accumulation_points(obj.provenance))
        return HandlebodySummary(INFINITE_GENUS, len(acc), acc)
    return HandlebodySummary(len(obj.pairs), 0, ())
