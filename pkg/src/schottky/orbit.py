"""Cayley-tree enumeration and orbit diagnostics for finite circle systems.

Letters are integer codes: ``2i`` is the generator ``g_{i+1}`` and ``2i + 1``
its inverse, so ``l ^ 1`` inverts a letter and the code order is
``g1, g1^-1, g2, g2^-1, ...``.  The Cayley-tree edge from ``w`` to ``w s``
carries the circle ``w(C_s)`` where ``C_s`` is the circle that ``s`` maps
the fundamental region into: ``C_i'`` for ``g_i`` and ``C_i`` for
``g_i^-1``.  Word lists are in shortlex order.

The heavy loops run per depth-1 subtree in :mod:`schottky._kernels` and
may be spread over threads; results are merged in letter order so the
output never depends on scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .config import CircleSystem, validate
from .errors import BudgetExceeded, NotAdmissible
from .moebius import INF, Moebius, OrientedCircle, apply_point

DEFAULT_BUDGET = 10_000_000
DEFAULT_THRESHOLD = 1e-2
WITNESS_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Word:
    """Reduced word stored as letter codes."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        for a, b in zip(letters, letters[1:]):
            if b == a ^ 1:
                raise ValueError(f"word is not reduced: {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def from_signed(cls, signed: Sequence[int]) -> "Word":
        """From signed generator indices, e.g. ``(1, -2)`` for ``g1 g2^-1``."""
        out = []
        for s in signed:
            if s == 0:
                raise ValueError("generator indices start at 1")
            out.append(2 * (abs(s) - 1) + (s < 0))
        return cls(tuple(out))

    def signed(self) -> tuple[int, ...]:
        return tuple(-(x // 2 + 1) if x & 1 else x // 2 + 1 for x in self.letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "e"
        return " ".join(f"g{abs(s)}" + ("^-1" if s < 0 else "") for s in self.signed())


def letter_side(letter: int) -> tuple[int, str]:
    """``(pair index, side)`` of the circle crossed by ``letter``."""
    return (letter // 2 + 1, "C" if letter & 1 else "C'")


@dataclass(frozen=True)
class TranslatedCircle:
    """Edge circle ``word(base)``; ``depth`` is the tree depth of the edge."""

    word: Word
    base: tuple[int, str]
    circle: OrientedCircle
    depth: int

    @property
    def edge_word(self) -> Word:
        """The word ``w s`` of the tree vertex this edge leads to."""
        i, side = self.base
        return Word(self.word.letters + (2 * (i - 1) + (side == "C"),))

    def base_circle(self, sys: CircleSystem) -> OrientedCircle:
        i, side = self.base
        p = sys.pairs[i - 1]
        return p.c if side == "C" else p.c_prime

    def check(self, sys: CircleSystem, tol: float = WITNESS_TOL) -> bool:
        """Map three points of the base circle and test they land on ``circle``."""
        g = word_map(sys, self.word)
        c = self.circle
        for z in self.base_circle(sys).points(3, phase=0.3):
            w = apply_point(g, complex(z))
            if w is INF:
                return False
            if abs(abs(w - c.center) - c.radius) > tol * max(1.0, c.radius, abs(c.center)):
                return False
        return True


@dataclass(frozen=True)
class NestedChain:
    circles: tuple[TranslatedCircle, ...]
    maximal: bool = True

    def is_nested(self) -> bool:
        """Each closed disc strictly contains the next closed disc."""
        for a, b in zip(self.circles, self.circles[1:]):
            ca, cb = a.circle, b.circle
            if not abs(ca.center - cb.center) + cb.radius < ca.radius:
                return False
        return True

    @property
    def radii(self) -> np.ndarray:
        return np.array([t.circle.radius for t in self.circles])

    def diameters(self) -> np.ndarray:
        return K.spherical_diameters(_circle_rows([t.circle for t in self.circles]))


def _circle_rows(circles) -> np.ndarray:
    return np.array([[c.center.real, c.center.imag, c.radius] for c in circles], dtype=float)


def _mat_rows(maps) -> np.ndarray:
    return np.array(
        [[g.a.real, g.a.imag, g.b.real, g.b.imag, g.c.real, g.c.imag, g.d.real, g.d.imag] for g in maps],
        dtype=float,
    )


def pack(sys: CircleSystem) -> tuple[np.ndarray, np.ndarray]:
    """Kernel inputs: generator rows and the edge circle of each letter."""
    return _mat_rows(sys.generators()), _circle_rows(sys.letter_circles())


def word_map(sys: CircleSystem, word: Word) -> Moebius:
    gens = sys.generators()
    out = Moebius.identity()
    for s in word.letters:
        out = out @ gens[s]
    return out


def level_size(k: int, m: int) -> int:
    """Number of reduced words of length exactly ``m`` on ``k`` generators."""
    if m == 0:
        return 1
    return 2 * k * (2 * k - 1) ** (m - 1)


def ball_size(k: int, n: int) -> int:
    """Vertices of the radius-``n`` ball of the Cayley tree."""
    return sum(level_size(k, m) for m in range(n + 1))


def _check_budget(needed: int, budget: int | None, what: str):
    budget = DEFAULT_BUDGET if budget is None else budget
    if needed > budget:
        raise BudgetExceeded(f"{what} needs {needed} items, budget is {budget}")


def enumerate_words(k: int, n: int, budget: int | None = None) -> list[Word]:
    """All reduced words of lengths ``1..n`` in shortlex order."""
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    _check_budget(ball_size(k, n) - 1, budget, "word enumeration")
    out: list[Word] = []
    level: list[tuple[int, ...]] = [()]
    for _ in range(n):
        level = [w + (s,) for w in level for s in range(2 * k) if not w or s != w[-1] ^ 1]
        out.extend(Word(w) for w in level)
    return out


def _map_subtrees(fn, letters, workers: int | None):
    if workers and workers > 1 and len(letters) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, letters))
    return [fn(s) for s in letters]


def _subtree_words(last: np.ndarray, parent: np.ndarray) -> list[tuple[int, ...]]:
    words: list[tuple[int, ...]] = []
    for j in range(len(last)):
        p = parent[j]
        words.append((words[p] if p >= 0 else ()) + (int(last[j]),))
    return words


@dataclass
class _Subtree:
    words: list
    circles: np.ndarray
    offsets: np.ndarray
    parent: np.ndarray
    mats: np.ndarray


def _edge_subtree(gens, base, first, depth) -> _Subtree:
    mats, last, parent, offsets = K.word_tree(gens, first, depth)
    # the edge for u = w s is w(C_s); the parent of a depth-1 edge is the identity
    pm = np.empty_like(mats)
    pm[0] = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0)
    pm[1:] = mats[parent[1:]]
    circles, bad = K.circle_images(pm, base[last])
    if bad.any():
        raise NotAdmissible("a translated circle degenerated to a line")
    return _Subtree(_subtree_words(last, parent), circles, offsets, parent, mats)


def _to_translated(sub: _Subtree, j: int) -> TranslatedCircle:
    u = sub.words[j]
    x, y, r = sub.circles[j]
    return TranslatedCircle(Word(u[:-1]), letter_side(u[-1]), OrientedCircle(complex(x, y), float(r)), len(u))


def _require_admissible(sys: CircleSystem):
    report = validate(sys)
    if not report.admissible:
        raise NotAdmissible(f"system has {len(report.violations)} violation(s)")


def translated_circles(
    sys: CircleSystem, depth: int, budget: int | None = None, workers: int | None = None
) -> list[TranslatedCircle]:
    """Edge circles of the radius-``depth`` Cayley ball in shortlex order.

    Depth 0 returns the ``2k`` base circles (the edges leaving the identity
    vertex), which is also the depth-1 ball.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    _require_admissible(sys)
    D = max(depth, 1)
    k = sys.k
    _check_budget(ball_size(k, D) - 1, budget, "translated circles")
    gens, base = pack(sys)
    subs = _map_subtrees(lambda s: _edge_subtree(gens, base, s, D), range(2 * k), workers)
    out = []
    for m in range(1, D + 1):
        for sub in subs:
            for j in range(sub.offsets[m - 1], sub.offsets[m]):
                out.append(_to_translated(sub, j))
    return out


def maximal_chains(
    sys: CircleSystem, depth: int, budget: int | None = None, workers: int | None = None
) -> list[NestedChain]:
    """One nested chain per reduced word of length ``depth`` (shortlex)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    _require_admissible(sys)
    k = sys.k
    _check_budget(ball_size(k, depth) - 1 + depth * level_size(k, depth), budget, "maximal chains")
    gens, base = pack(sys)
    subs = _map_subtrees(lambda s: _edge_subtree(gens, base, s, depth), range(2 * k), workers)
    out = []
    for sub in subs:
        for j in range(sub.offsets[depth - 1], sub.offsets[depth]):
            path = []
            while j >= 0:
                path.append(_to_translated(sub, j))
                j = sub.parent[j]
            out.append(NestedChain(tuple(reversed(path)), maximal=True))
    return out


@dataclass(frozen=True)
class DiameterProfile:
    depths: tuple[int, ...]
    count: tuple[int, ...]
    max_diam: tuple[float, ...]
    mean_diam: tuple[float, ...]
    fundamental_domain_plausible: bool
    threshold: float
    heuristic: bool = True

    def rows(self) -> list[dict]:
        return [
            {"depth": d, "count": c, "max_diam": mx, "mean_diam": mn}
            for d, c, mx, mn in zip(self.depths, self.count, self.max_diam, self.mean_diam)
        ]

    def decay_rate(self) -> float:
        """Least-squares slope of ``log max_diam`` against depth."""
        return float(np.polyfit(np.array(self.depths, float), np.log(self.max_diam), 1)[0])

    def to_dict(self) -> dict:
        return {
            "rows": self.rows(),
            "verdict": {
                "fundamental_domain_plausible": self.fundamental_domain_plausible,
                "heuristic": self.heuristic,
                "threshold": self.threshold,
                "rule": "max diameter strictly decreasing over the last 3 depths and below threshold",
            },
        }


def _level_stats(sys, depth, threshold, workers):
    gens, base = pack(sys)
    parts = _map_subtrees(
        lambda s: K.level_stats(gens, base, s, depth, threshold), range(2 * sys.k), workers
    )
    count = np.zeros(depth, dtype=np.int64)
    maxd = np.zeros(depth)
    sumd = np.zeros(depth)
    large = np.zeros(depth, dtype=np.int64)
    for c, mx, sm, lg in parts:
        count += c
        maxd = np.maximum(maxd, mx)
        sumd += sm
        large += lg
    return count, maxd, sumd, large


def diameter_profile(
    sys: CircleSystem,
    depth: int,
    threshold: float = DEFAULT_THRESHOLD,
    budget: int | None = None,
    workers: int | None = None,
) -> DiameterProfile:
    """Max and mean spherical diameter of the edge circles at each depth.

    The verdict is a heuristic for "diameters tend to zero along every
    chain": it holds when the max diameter strictly decreases over the last
    three depths and ends below ``threshold``.  Fewer than three depths give
    a negative verdict.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    _require_admissible(sys)
    _check_budget(ball_size(sys.k, depth) - 1, budget, "diameter profile")
    count, maxd, sumd, _ = _level_stats(sys, depth, threshold, workers)
    mean = sumd / count
    plausible = bool(
        depth >= 3 and maxd[-3] > maxd[-2] > maxd[-1] and maxd[-1] < threshold
    )
    return DiameterProfile(
        tuple(range(1, depth + 1)),
        tuple(int(c) for c in count),
        tuple(float(x) for x in maxd),
        tuple(float(x) for x in mean),
        plausible,
        float(threshold),
    )


def min_plane_distance(sys: CircleSystem) -> float:
    """Smallest hyperbolic distance between the planes of two system circles."""
    report = validate(sys)
    if not report.admissible:
        raise NotAdmissible(f"system has {len(report.violations)} violation(s)")
    return report.min_plane_distance


@dataclass(frozen=True)
class Census:
    depths: tuple[int, ...]
    counts: tuple[int, ...]
    cumulative: tuple[int, ...]
    threshold: float
    visited: int
    stable_from: int | None
    max_diam: tuple[float, ...] = ()
    mean_diam: tuple[float, ...] = ()

    def rows(self) -> list[dict]:
        """Per-depth rows; diameters are over the counted (large) circles, 0 if none."""
        return [
            {"depth": d, "count": c, "cumulative": t, "max_diam": mx, "mean_diam": mn}
            for d, c, t, mx, mn in zip(self.depths, self.counts, self.cumulative, self.max_diam, self.mean_diam)
        ]

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "visited": self.visited,
            "stable_from": self.stable_from,
            "rows": self.rows(),
        }


def census_large(
    sys: CircleSystem,
    depth: int,
    M: float,
    budget: int | None = None,
    workers: int | None = None,
) -> Census:
    """Count edge circles with spherical diameter above ``M`` at each depth.

    Subtrees are pruned below circles that are at most hemispheres and
    already no larger than ``M``; nested descendants are smaller still, so
    the counts are exact.  ``stable_from`` is the first depth from which
    every count is zero, i.e. the cumulative count has stopped growing.
    Depth 0 reports the base circles.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    _require_admissible(sys)
    D = max(depth, 1)
    budget = DEFAULT_BUDGET if budget is None else budget
    gens, base = pack(sys)
    parts = _map_subtrees(lambda s: K.census(gens, base, s, D, M, budget), range(2 * sys.k), workers)
    counts = np.zeros(D, dtype=np.int64)
    maxd = np.zeros(D)
    sumd = np.zeros(D)
    visited = 0
    for c, mx, sm, v in parts:
        if v < 0:
            raise BudgetExceeded(f"census visited more than {budget} circles in one subtree")
        counts += c
        maxd = np.maximum(maxd, mx)
        sumd += sm
        visited += int(v)
    if visited > budget:
        raise BudgetExceeded(f"census visited {visited} circles, budget is {budget}")
    depths = (0,) if depth == 0 else tuple(range(1, D + 1))
    cum = np.cumsum(counts)
    nz = np.nonzero(counts)[0]
    stable = None
    if nz.size == 0:
        stable = depths[0]
    elif nz[-1] + 1 < D:
        stable = depths[nz[-1] + 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, sumd / np.maximum(counts, 1), 0.0)
    return Census(
        depths,
        tuple(int(c) for c in counts),
        tuple(int(c) for c in cum),
        float(M),
        visited,
        stable,
        tuple(float(x) for x in maxd),
        tuple(float(x) for x in mean),
    )


def _point(row, flag):
    return INF if flag else complex(row[0], row[1]) + 0.0


def _fixed_points_subtree(gens, first, depth):
    mats, last, parent, offsets = K.word_tree(gens, first, depth)
    lo, hi = offsets[depth - 1], offsets[depth]
    return K.attracting_fixed_points(mats[lo:hi])


def limit_set_sample(
    sys: CircleSystem, depth: int, budget: int | None = None, workers: int | None = None
) -> list:
    """Attracting fixed points of all reduced words of length ``depth``.

    Each point lies in the limit set, inside the disc of the word's first
    letter.  Order follows the words in shortlex order.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    _require_admissible(sys)
    _check_budget(ball_size(sys.k, depth) - 1, budget, "limit set sample")
    gens, _ = pack(sys)
    parts = _map_subtrees(lambda s: _fixed_points_subtree(gens, s, depth), range(2 * sys.k), workers)
    out = []
    for pts, flags in parts:
        out.extend(_point(r, f) for r, f in zip(pts, flags))
    return out


def sample_words(k: int, depth: int) -> list[Word]:
    """The words behind :func:`limit_set_sample`, in the same order."""
    return [w for w in enumerate_words(k, depth) if len(w) == depth]


__all__ = [
    "DEFAULT_BUDGET",
    "Census",
    "DiameterProfile",
    "NestedChain",
    "TranslatedCircle",
    "Word",
    "ball_size",
    "census_large",
    "diameter_profile",
    "enumerate_words",
    "level_size",
    "limit_set_sample",
    "maximal_chains",
    "min_plane_distance",
    "pack",
    "sample_words",
    "translated_circles",
    "word_map",
]
