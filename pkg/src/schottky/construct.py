"""Constructions of circle systems with prescribed ends or orbit behaviour.

* :func:`realize_end_space` builds a family of pairs for every bounded gap
  of a closed subset of ``[0, 1]``, so the circles accumulate exactly on the
  gap endpoints.
* :func:`build_nested_counterexample` builds a Fuchsian Schottky-like system
  whose translates form a nested chain converging to a circle of positive
  radius.
* :func:`build_fat_limit_set` builds ``2n`` circles orthogonal to the unit
  circle with a prescribed lower bound on plane distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import (
    CirclePair,
    CircleSystem,
    ConjugatedFamily,
    FamilySpec,
    TailFamily,
    accumulation_points,
    validate,
)
from .errors import BadLengths, InfeasibleMargin
from .moebius import (
    Moebius,
    OrientedCircle,
    apply_circle,
    apply_point,
    chordal_distance,
    limit_points,
    pair_circles,
    spherical_diameter,
)
from .orbit import NestedChain, TranslatedCircle, Word

POINT_TOL = 1e-12
MIN_MARGIN = 2.0
# log-coordinate half width of the base circles of a gap family
GAP_HALF_WIDTH = 0.25
TAIL_SCALE = 0.25


# ---------------------------------------------------------------- end spaces


@dataclass(frozen=True)
class EndSetSpec:
    """Closed subset of ``[0, 1]``: explicit points and/or a Cantor stage.

    ``cantor_depth = d`` contributes the ``2^d`` closed intervals of the
    middle-thirds construction at stage ``d``.  ``handles`` adds that many
    explicit pairs away from the real axis (finite genus part).
    """

    points: tuple[float, ...] = ()
    cantor_depth: int | None = None
    handles: int = 0

    def __post_init__(self):
        pts = tuple(sorted(float(p) for p in self.points))
        for p in pts:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"end point {p} outside [0, 1]")
        for a, b in zip(pts, pts[1:]):
            if b - a <= POINT_TOL:
                raise ValueError("end points must be distinct")
        if self.cantor_depth is not None and self.cantor_depth < 0:
            raise ValueError("cantor_depth must be >= 0")
        if self.handles < 0:
            raise ValueError("handles must be >= 0")
        object.__setattr__(self, "points", pts)

    @property
    def is_empty(self) -> bool:
        return not self.points and self.cantor_depth is None

    def blocks(self) -> list[tuple[float, float]]:
        """Disjoint closed blocks (possibly degenerate) covering the set, left to right."""
        raw = [(p, p) for p in self.points]
        if self.cantor_depth is not None:
            raw.extend(cantor_intervals(self.cantor_depth))
        raw.sort()
        merged: list[list[float]] = []
        for lo, hi in raw:
            if merged and lo <= merged[-1][1] + POINT_TOL:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [(lo, hi) for lo, hi in merged]

    def gaps(self) -> list[tuple[float, float]]:
        """Bounded complementary intervals, left to right."""
        b = self.blocks()
        return [(b[i][1], b[i + 1][0]) for i in range(len(b) - 1)]


def cantor_intervals(depth: int) -> list[tuple[float, float]]:
    out = [(0.0, 1.0)]
    for _ in range(depth):
        nxt = []
        for a, b in out:
            w = (b - a) / 3.0
            nxt.extend(((a, a + w), (b - w, b)))
        out = nxt
    return out


def gap_chart(a: float, b: float) -> Moebius:
    """``T(z) = (z - a) / (b - z)`` sending ``(a, b)`` onto the positive reals."""
    return Moebius(1.0, -a, -1.0, b)


def gap_geometry(margin: float) -> dict:
    """Log-coordinate layout of a gap family for the given margin.

    In ``w = T(z)`` the base circles have diameters ``[e^(-t-s), e^(-t+s)]``
    and ``[e^(t-s), e^(t+s)]``, the conjugator is ``w -> e^L w`` and its
    fundamental annulus ``|log w| <= L/2`` contains both.  Every gap (``C``
    to ``C'`` and either circle to the annulus boundary) is ``margin``
    times the half width ``s``.
    """
    if not margin >= MIN_MARGIN:
        raise InfeasibleMargin(f"margin must be >= {MIN_MARGIN}, got {margin}")
    s = GAP_HALF_WIDTH
    t = s * (1.0 + margin / 2.0)
    L = 2.0 * s * (2.0 + 1.5 * margin)
    return {"half_width": s, "offset": t, "translation_length": L}


def _real_circle(x1: float, x2: float) -> OrientedCircle:
    return OrientedCircle(complex((x1 + x2) / 2.0, 0.0), abs(x2 - x1) / 2.0)


def gap_family(a: float, b: float, margin: float) -> ConjugatedFamily:
    """Family of pairs in the gap ``(a, b)`` accumulating on ``a`` and ``b``."""
    geo = gap_geometry(margin)
    s, t, L = geo["half_width"], geo["offset"], geo["translation_length"]
    T = gap_chart(a, b)
    Ti = T.inverse()

    def pull(x):
        return apply_point(Ti, x).real

    c = _real_circle(pull(math.exp(-t - s)), pull(math.exp(-t + s)))
    cp = _real_circle(pull(math.exp(t - s)), pull(math.exp(t + s)))
    h = Ti @ Moebius.scaling(math.exp(L)) @ T
    return ConjugatedFamily(CirclePair(c, cp, pair_circles(c, cp)), h)


def _handle_pairs(n: int) -> list[CirclePair]:
    out = []
    for j in range(n):
        y = 2.0 + 2.0 * j
        c = OrientedCircle(complex(-0.25, y), 0.25)
        cp = OrientedCircle(complex(1.25, y), 0.25)
        out.append(CirclePair.canonical(c, cp))
    return out


def _tails(spec: EndSetSpec) -> list[TailFamily]:
    """Outward tails at block endpoints that bound no gap."""
    blocks = spec.blocks()
    gap_ends = {x for g in spec.gaps() for x in g}
    out = []
    for lo, hi in blocks:
        if lo == hi:
            if lo not in gap_ends:
                out.append(TailFamily(lo, 1.0, TAIL_SCALE))
            continue
        if lo not in gap_ends:
            out.append(TailFamily(lo, -1.0, TAIL_SCALE))
        if hi not in gap_ends:
            out.append(TailFamily(hi, 1.0, TAIL_SCALE))
    return out


def end_space_delta(margin: float) -> float:
    """Smallest plane distance inside one gap family built with ``margin``.

    Plane distances are Moebius invariant, so this does not depend on the
    gap; it is measured on the unit gap at radius 2.
    """
    sys = FamilySpec(families=(gap_family(0.0, 1.0, margin),)).materialize(2)
    return validate(sys).min_plane_distance


def tail_delta() -> float:
    """Smallest plane distance inside one tail family (scale invariant)."""
    sys = FamilySpec(tails=(TailFamily(0.0, 1.0, TAIL_SCALE),)).materialize(3)
    return validate(sys).min_plane_distance


def realize_end_space(spec: EndSetSpec, N: int, margin: float) -> FamilySpec:
    """Family spec whose circles accumulate exactly on the ends in ``spec``.

    Every bounded gap ``(a, b)`` gets a conjugated family ``h^n (C, C', g)``
    where ``h`` is hyperbolic with fixed points ``a`` and ``b``.  Isolated
    block endpoints that bound no gap get a one-sided geometric tail.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    geo = gap_geometry(margin)
    fams = tuple(gap_family(a, b, margin) for a, b in spec.gaps())
    tails = tuple(_tails(spec))
    bounds = [end_space_delta(margin)] if fams else []
    if tails:
        bounds.append(tail_delta())
    fam = FamilySpec(
        families=fams,
        explicit=tuple(_handle_pairs(spec.handles)),
        tails=tails,
        radius=N,
        metadata={
            "margin": float(margin),
            # plane distance bound inside each family or tail present
            "delta": min(bounds) if bounds else None,
            "gaps": [list(g) for g in spec.gaps()],
            "tails": [[t.point.real, t.direction.real] for t in tails],
            "geometry": geo,
        },
    )
    sys = fam.materialize(N)
    for c in sys.circles():
        if c.radius < POINT_TOL * (1.0 + abs(c.center)):
            raise InfeasibleMargin(f"circles degenerate at radius N={N}; lower N or margin")
    fam.metadata["min_plane_distance"] = validate(sys).min_plane_distance
    return fam


def outer_centers(fam: FamilySpec, N: int) -> list[complex]:
    """Centers of the circles with ``|n| = N`` in every family and tail."""
    out = []
    for f in fam.families:
        for n in {N, -N}:
            p = f.pair(n)
            out.extend((p.c.center, p.c_prime.center))
    for t in fam.tails:
        p = t.pair(N)
        out.extend((p.c.center, p.c_prime.center))
    return out


def hausdorff_distance(A, B) -> float:
    """Chordal Hausdorff distance between two finite point sets."""
    if not A or not B:
        return math.inf
    D = np.array([[chordal_distance(a, b) for b in B] for a in A])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def outer_layer_distance(fam: FamilySpec, N: int) -> float:
    """Hausdorff distance from the outermost layer of circles to the ends."""
    return hausdorff_distance(outer_centers(fam, N), accumulation_points(fam))


# ------------------------------------------------------ nested counterexample


@dataclass(frozen=True)
class CounterexampleRecipe:
    """Orthogeodesic lengths ``l_1..l_N`` and the remainder ``sum_{i>N} l_i``.

    The remainder comes from the closed-form rule the lengths were drawn
    from; it is what lets a finite build speak about the infinite chain.
    """

    lengths: tuple[float, ...]
    tail: float = 0.0
    rule: str = "explicit"
    pair_distance: float = 1.0
    growth: float = 1.5

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        if len(lengths) < 2:
            raise BadLengths("need at least 2 lengths")
        if any(not (x > 0 and math.isfinite(x)) for x in lengths):
            raise BadLengths("lengths must be positive and finite")
        if not (self.tail >= 0 and math.isfinite(self.tail)):
            raise BadLengths("tail sum must be finite and >= 0")
        if not (self.pair_distance > 0 and self.growth > 0):
            raise BadLengths("pair_distance and growth must be positive")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def geometric(cls, N: int, first: float = 0.5, ratio: float = 0.5) -> "CounterexampleRecipe":
        """``l_i = first * ratio^(i-1)`` for ``i = 1..N`` with its exact tail."""
        if N < 2:
            raise BadLengths("need N >= 2")
        if not 0 < ratio < 1 or first <= 0:
            raise BadLengths("geometric rule needs first > 0 and 0 < ratio < 1")
        lengths = tuple(first * ratio ** i for i in range(N))
        tail = first * ratio ** N / (1.0 - ratio)
        return cls(lengths, tail, rule=f"geometric(first={first!r}, ratio={ratio!r})")

    @property
    def N(self) -> int:
        return len(self.lengths)


@dataclass(frozen=True)
class CounterexampleResult:
    sys: CircleSystem
    chain: NestedChain
    limit_radius_lower_bound: float
    limit_diameter: float
    metadata: dict = field(default_factory=dict, compare=False)


def _next_center(x: float, r1: float, r2: float, dist: float) -> float:
    """Center of the circle of radius ``r2`` right of ``(x, r1)`` at plane distance ``dist``."""
    return x + math.sqrt(r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * math.cosh(dist))


def _foot(c1: OrientedCircle, c2: OrientedCircle) -> complex:
    """Upper intersection point of two real-centered circles."""
    m1, m2 = c1.center.real, c2.center.real
    x = (c1.radius ** 2 - c2.radius ** 2 + m2 * m2 - m1 * m1) / (2.0 * (m2 - m1))
    y2 = c1.radius ** 2 - (x - m1) ** 2
    return complex(x, math.sqrt(max(y2, 0.0)))


def _perpendicular(c1: OrientedCircle, c2: OrientedCircle) -> OrientedCircle:
    p, q = limit_points(c1, c2)
    return _real_circle(p.real, q.real)


def _axis_translation(c: OrientedCircle, src: complex, dst: complex) -> Moebius:
    """Hyperbolic map with axis ``c`` moving ``src`` to ``dst`` (both on ``c``)."""
    e1, e2 = c.center.real - c.radius, c.center.real + c.radius
    S = Moebius(1.0, -e1, 1.0, -e2)
    lam = abs(apply_point(S, dst)) / abs(apply_point(S, src))
    return S.inverse() @ Moebius.scaling(lam) @ S


def _layout(recipe: CounterexampleRecipe) -> list[OrientedCircle]:
    """Circles ``C_1, C_1', C_2, ...`` orthogonal to the real line, left to right."""
    out = [OrientedCircle(0.0, 1.0)]
    x, r = 0.0, 1.0
    dists = []
    for i in range(recipe.N):
        dists.append(recipe.pair_distance)
        if i + 1 < recipe.N:
            dists.append(recipe.lengths[i])
    for d in dists:
        r2 = r * recipe.growth
        x = _next_center(x, r, r2, d)
        r = r2
        out.append(OrientedCircle(complex(x, 0.0), r))
    return out


def build_nested_counterexample(recipe: CounterexampleRecipe) -> CounterexampleResult:
    """Fuchsian system with a nested chain converging to a circle.

    Circles ``C_i, C_i'`` are orthogonal to the real line with plane
    distance ``l_i`` from ``C_i'`` to ``C_(i+1)``.  The map ``g_i`` sends
    ``Ext C_i'`` onto ``Int C_i``; for ``i >= 2`` it is the canonical pairing
    followed by a translation along ``C_i`` so that the image of the common
    perpendicular of ``C_i'`` and ``C_(i+1)`` continues the one of
    ``C_(i-1)'`` and ``C_i``.  The chain ``C_1, g_1 C_2, g_1 g_2 C_3, ...``
    is then orthogonal to one geodesic, at spacings ``l_i`` along it, so the
    circles converge to the circle at distance ``sum l_i`` from ``C_1``.

    Pair ``i`` of the returned system is ``(C_i', C_i, g_i)``, matching the
    convention ``g(Ext c) = Int c'``.
    """
    N = recipe.N
    circ = _layout(recipe)
    C = circ[0::2]
    Cp = circ[1::2]
    pairs = []
    for i in range(N):
        g = pair_circles(Cp[i], C[i])
        if 0 < i < N - 1:
            # the image of the foot of the perpendicular at C_i' must land on
            # the foot of the previous perpendicular at C_i
            target = _foot(C[i], _perpendicular(Cp[i - 1], C[i]))
            src = apply_point(g, _foot(Cp[i], _perpendicular(Cp[i], C[i + 1])))
            g = _axis_translation(C[i], src, target) @ g
        pairs.append(CirclePair(Cp[i], C[i], g, label=i + 1))
    sys = CircleSystem(tuple(pairs))

    chain = []
    w = Moebius.identity()
    for m in range(N):
        chain.append(TranslatedCircle(Word(tuple(range(0, 2 * m, 2))), (m + 1, "C'"), apply_circle(w, C[m]), m + 1))
        w = w @ pairs[m].map
    chain = NestedChain(tuple(chain), maximal=False)

    # the chain is orthogonal to g_1 applied to the perpendicular of C_1', C_2;
    # normalize that geodesic to the imaginary axis
    e1, e2 = (apply_point(pairs[0].map, z) for z in limit_points(Cp[0], C[1]))
    M = Moebius(1.0, -e1, 1.0, -e2)
    rho = []
    for t in chain.circles[:2]:
        z = t.circle.center + t.circle.radius
        rho.append(abs(apply_point(M, z)))
    total = sum(recipe.lengths) + recipe.tail
    # in the normalized chart the chain circles are |w| = rho_m
    sign = 1.0 if rho[1] > rho[0] else -1.0
    rho_inf = rho[0] * math.exp(sign * total)
    limit = apply_circle(M.inverse(), OrientedCircle(0.0, rho_inf))
    return CounterexampleResult(
        sys,
        chain,
        float(limit.radius),
        float(spherical_diameter(limit)),
        metadata={
            "schottky_like_only": True,
            "rule": recipe.rule,
            "lengths": list(recipe.lengths),
            "tail": recipe.tail,
            "pair_distance": recipe.pair_distance,
            "growth": recipe.growth,
            "limit_center": [limit.center.real, limit.center.imag],
        },
    )


# ---------------------------------------------------------------- fat limit set


def fat_radius(n: int, delta: float) -> float:
    """Radius making adjacent circles of the ``2n``-ring exactly ``delta`` apart."""
    s = math.sin(math.pi / (2 * n))
    return math.sqrt(2.0 * s * s / (math.cosh(delta) + 1.0 - 2.0 * s * s))


def build_fat_limit_set(n: int, delta: float) -> CircleSystem:
    """``2n`` circles orthogonal to the unit circle, antipodes paired.

    Circle ``m`` sits at angle ``pi m / n``; adjacent circles are at plane
    distance ``delta`` (slightly more after a relative shrink of 1e-12) and
    all others are farther apart.  Pair ``i`` is circles ``i`` and ``i + n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not delta > 0:
        raise ValueError("delta must be positive")
    r = fat_radius(n, delta) * (1.0 - 1e-12)
    if not r >= 1e-8:
        raise InfeasibleMargin(f"radius {r:.3g} too small for n={n}, delta={delta}")
    rho = math.sqrt(1.0 + r * r)
    circles = [
        OrientedCircle(rho * complex(math.cos(math.pi * m / n), math.sin(math.pi * m / n)), r)
        for m in range(2 * n)
    ]
    pairs = tuple(CirclePair.canonical(circles[i], circles[i + n], label=i + 1) for i in range(n))
    return CircleSystem(pairs)


__all__ = [
    "CounterexampleRecipe",
    "CounterexampleResult",
    "EndSetSpec",
    "build_fat_limit_set",
    "build_nested_counterexample",
    "cantor_intervals",
    "end_space_delta",
    "fat_radius",
    "gap_family",
    "hausdorff_distance",
    "outer_centers",
    "outer_layer_distance",
    "realize_end_space",
    "tail_delta",
]
