"""Points of the extended plane, Moebius maps, circles, and the canonical pairing.

Conventions
-----------
* Finite points are plain ``complex`` numbers; the point at infinity is the
  singleton :data:`INF`.
* A :class:`Moebius` is stored as a normalized matrix ``[[a, b], [c, d]]`` with
  ``ad - bc = 1``.  The sign ambiguity of PSL(2, C) is left alone.
* Every :class:`OrientedCircle` bounds a bounded interior disc; the base point
  of a configuration is always infinity, which lies in the common exterior.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DiscsOverlapOrNested, ImageIsLine, IsIdentity

# Tolerances shared by all modules.
NORMALIZATION_TOL = 1e-12
GEOMETRY_TOL = 1e-9
CLASSIFICATION_TOL = 1e-10


class _PointAtInfinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_PointAtInfinity, ())


INF = _PointAtInfinity()

SpherePoint = Union[complex, _PointAtInfinity]


def is_inf(z) -> bool:
    return z is INF


def as_point(z) -> SpherePoint:
    """Coerce numbers to ``complex``; infinity stays :data:`INF`."""
    if z is INF:
        return INF
    w = complex(z)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"finite sphere points need finite coordinates, got {z!r}")
    return w


@dataclass(frozen=True)
class Moebius:
    """A normalized Moebius transformation ``z -> (az + b) / (cz + d)``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if abs(det) == 0.0 or not cmath.isfinite(det):
            raise ValueError("singular matrix is not a Moebius transformation")
        if abs(det - 1.0) > NORMALIZATION_TOL:
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> "Moebius":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def scaling(cls, k: complex) -> "Moebius":
        """``z -> k z``."""
        return cls(k, 0, 0, 1)

    @classmethod
    def translation(cls, t: complex) -> "Moebius":
        return cls(1, t, 0, 1)

    @classmethod
    def rotation(cls, angle: float) -> "Moebius":
        return cls.scaling(cmath.exp(1j * angle))

    @classmethod
    def from_fixed_points(cls, attracting, repelling, multiplier: complex) -> "Moebius":
        """Loxodromic map with the given fixed points and multiplier ``|k| > 1``.

        Conjugates ``w -> k w`` by ``S(z) = (z - repelling) / (z - attracting)``.
        """
        if attracting is INF:
            s = cls(1, -repelling, 0, 1)
        elif repelling is INF:
            s = cls(0, 1, 1, -attracting)
        else:
            s = cls(1, -repelling, 1, -attracting)
        return s.inverse() @ cls.scaling(multiplier) @ s

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return compose(self, other)

    def __call__(self, z):
        return apply_point(self, z)

    def conj_by(self, m: "Moebius") -> "Moebius":
        """Return ``m o self o m^-1``."""
        return m @ self @ m.inverse()

    def isclose(self, other: "Moebius", tol: float = 1e-9) -> bool:
        """Equality in PSL(2, C): entries agree up to a common sign."""
        x = np.array([self.a, self.b, self.c, self.d])
        y = np.array([other.a, other.b, other.c, other.d])
        scale = max(1.0, float(np.abs(x).max()))
        return bool(min(np.abs(x - y).max(), np.abs(x + y).max()) <= tol * scale)

    def __repr__(self):
        return f"Moebius({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g})"


def compose(f: Moebius, g: Moebius) -> Moebius:
    """``f o g``."""
    return Moebius(
        f.a * g.a + f.b * g.c,
        f.a * g.b + f.b * g.d,
        f.c * g.a + f.d * g.c,
        f.c * g.b + f.d * g.d,
    )


def inverse(g: Moebius) -> Moebius:
    return g.inverse()


def apply_point(g: Moebius, z) -> SpherePoint:
    if z is INF:
        return INF if g.c == 0 else g.a / g.c
    z = complex(z)
    num = g.a * z + g.b
    den = g.c * z + g.d
    if den == 0:
        return INF
    return num / den


def derivative(g: Moebius, z: complex) -> complex:
    """``g'(z) = 1 / (cz + d)^2`` for finite ``z`` off the pole."""
    return 1.0 / (g.c * z + g.d) ** 2


@dataclass(frozen=True)
class OrientedCircle:
    """Euclidean circle; the interior is always the bounded disc."""

    center: complex
    radius: float

    def __post_init__(self):
        c = complex(self.center)
        r = float(self.radius)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError("circle center must be finite")
        if not (r > 0.0 and math.isfinite(r)):
            raise ValueError(f"circle radius must be positive and finite, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def contains(self, z, tol: float = 0.0) -> bool:
        """Strict interior test (with optional slack relative to the radius)."""
        if z is INF:
            return False
        return abs(complex(z) - self.center) < self.radius * (1.0 - tol)

    def points(self, n: int, phase: float = 0.0) -> np.ndarray:
        t = phase + 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * t)

    def __repr__(self):
        return f"OrientedCircle(center={self.center:.6g}, radius={self.radius:.6g})"


def apply_circle(g: Moebius, circ: OrientedCircle) -> OrientedCircle:
    """Image of ``circ`` under ``g``.

    The image center is the image of the reflection of the pole ``g^-1(inf)``
    in ``circ``; written out this avoids any division by ``c``.
    """
    p, r = circ.center, circ.radius
    w = g.c * p + g.d
    w2 = w.real * w.real + w.imag * w.imag
    c2 = (g.c.real * g.c.real + g.c.imag * g.c.imag) * r * r
    den = w2 - c2
    if abs(den) <= GEOMETRY_TOL * (w2 + c2):
        raise ImageIsLine(f"image of {circ!r} passes through infinity")
    center = ((g.a * p + g.b) * w.conjugate() - r * r * g.a * g.c.conjugate()) / den
    return OrientedCircle(center, r / abs(den))


class MoebiusClass(enum.Enum):
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class Classification:
    kind: MoebiusClass
    trace_squared: complex
    multiplier: complex | None = None

    @property
    def is_loxodromic(self) -> bool:
        return self.kind is MoebiusClass.LOXODROMIC


def _is_identity(g: Moebius, tol: float) -> bool:
    return abs(g.b) <= tol and abs(g.c) <= tol and abs(g.a - g.d) <= tol


def _large_eigenvalue(g: Moebius) -> complex:
    tr = g.trace
    disc = cmath.sqrt(tr * tr - 4.0)
    k1, k2 = (tr + disc) / 2.0, (tr - disc) / 2.0
    return k1 if abs(k1) >= abs(k2) else k2


def classify(g: Moebius) -> Classification:
    tr2 = g.trace ** 2
    if _is_identity(g, CLASSIFICATION_TOL):
        return Classification(MoebiusClass.IDENTITY, tr2)
    if abs(tr2 - 4.0) <= CLASSIFICATION_TOL:
        return Classification(MoebiusClass.PARABOLIC, tr2)
    if abs(tr2.imag) <= CLASSIFICATION_TOL and -CLASSIFICATION_TOL <= tr2.real < 4.0:
        return Classification(MoebiusClass.ELLIPTIC, tr2)
    k = _large_eigenvalue(g)
    return Classification(MoebiusClass.LOXODROMIC, tr2, k * k)


def fixed_points(g: Moebius) -> tuple:
    """Fixed points of ``g``; loxodromic maps give ``(attracting, repelling)``."""
    if _is_identity(g, CLASSIFICATION_TOL):
        raise IsIdentity("the identity fixes every point")
    a, b, c, d = g.a, g.b, g.c, g.d
    scale = max(abs(a), abs(d), 1.0)
    if abs(c) <= 1e-15 * scale:
        if abs(a - d) <= CLASSIFICATION_TOL * scale:
            return (INF,)
        finite = b / (d - a)
        # z -> (a/d) z + b/d: infinity attracts iff |a/d| > 1
        return (INF, finite) if abs(a) > abs(d) else (finite, INF)
    tr = a + d
    disc = cmath.sqrt(tr * tr - 4.0)
    if abs(tr * tr - 4.0) <= CLASSIFICATION_TOL:
        return ((a - d) / (2.0 * c),)
    z1 = ((a - d) + disc) / (2.0 * c)
    z2 = ((a - d) - disc) / (2.0 * c)
    # |g'(z)| = 1/|cz + d|^2, so the attracting point has the larger |cz + d|
    if abs(c * z1 + d) >= abs(c * z2 + d):
        return (z1, z2)
    return (z2, z1)


def chordal_distance(z, w) -> float:
    if z is INF and w is INF:
        return 0.0
    if z is INF:
        z, w = w, z
    z = complex(z)
    if w is INF:
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    w = complex(w)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def spherical_diameter(circ: OrientedCircle) -> float:
    """Chordal diameter of a circle.

    The two points of ``circ`` on the ray through its center are antipodal on
    the corresponding circle of the sphere, so the diameter is their chordal
    distance.
    """
    s = abs(circ.center)
    r = circ.radius
    x1, x2 = s - r, s + r
    return 4.0 * r / math.sqrt((1.0 + x1 * x1) * (1.0 + x2 * x2))


def is_great_circle(circ: OrientedCircle, tol: float = GEOMETRY_TOL) -> bool:
    return abs(circ.radius ** 2 - 1.0 - abs(circ.center) ** 2) <= tol * (1.0 + circ.radius ** 2)


def chordal_circle_deviation(c1: OrientedCircle, c2: OrientedCircle) -> float:
    """Largest chordal distance between matching cardinal points of two circles."""
    offsets = (1, 1j, -1, -1j)
    return max(
        chordal_distance(c1.center + c1.radius * u, c2.center + c2.radius * u)
        for u in offsets
    )


class PlaneDistance(NamedTuple):
    inversive: float
    hyperbolic: float


def inversive_distance(c1: OrientedCircle, c2: OrientedCircle) -> float:
    d = abs(c1.center - c2.center)
    r1, r2 = c1.radius, c2.radius
    return ((d - r1 - r2) * (d + r1 + r2) + 2.0 * r1 * r2) / (2.0 * r1 * r2)


def plane_distance(c1: OrientedCircle, c2: OrientedCircle) -> PlaneDistance:
    """Inversive distance and hyperbolic distance between spanning planes.

    Disjoint discs give inversive distance > 1; strictly nested discs give
    inversive distance < -1 and the planes are still disjoint, so the distance
    is ``arccosh(|inversive|)``.
    """
    inv = inversive_distance(c1, c2)
    if abs(inv) < 1.0 + NORMALIZATION_TOL:
        raise DiscsOverlapOrNested(
            f"circles are tangent or intersect (inversive distance {inv:.17g})"
        )
    return PlaneDistance(inv, math.acosh(abs(inv)))


def limit_points(c1: OrientedCircle, c2: OrientedCircle) -> tuple[complex, complex]:
    """Common inverse points of two circles with disjoint closed discs.

    These are the endpoints of the common perpendicular of the spanning
    planes; the first lies inside ``c1``, the second inside ``c2``.
    """
    inv = inversive_distance(c1, c2)
    if inv < 1.0 + NORMALIZATION_TOL:
        raise DiscsOverlapOrNested(
            f"closed discs are not disjoint (inversive distance {inv:.17g})"
        )
    delta = c2.center - c1.center
    dist = abs(delta)
    u = delta / dist
    r1, r2 = c1.radius, c2.radius
    # x^2 - B x + r1^2 = 0 along the line of centers, origin at c1's center
    big_b = (dist - r2) * (dist + r2) / dist + r1 * r1 / dist
    root = math.sqrt((big_b - 2.0 * r1) * (big_b + 2.0 * r1))
    x_near = 2.0 * r1 * r1 / (big_b + root)
    x_far = r1 * r1 / x_near
    return c1.center + u * x_near, c1.center + u * x_far


def pair_circles(c: OrientedCircle, c_prime: OrientedCircle, twist: float = 0.0) -> Moebius:
    """Canonical loxodromic map with ``g(Ext c) = Int c_prime``.

    The axis of ``g`` is the common perpendicular of the planes spanned by the
    two circles, its translation length is their hyperbolic distance, and
    ``twist`` adds a rotation about the axis.
    """
    xi_in, xi_out = limit_points(c, c_prime)
    dist = plane_distance(c, c_prime).hyperbolic
    k = cmath.exp(complex(dist, twist))
    return Moebius.from_fixed_points(xi_out, xi_in, k)
