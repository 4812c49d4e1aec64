"""Moduli of annuli and slit discs, derivative bounds, and collar maps.

``mu(r)`` is the modulus of the unit disc slit along ``[0, r]``, computed
from complete elliptic integrals through the arithmetic-geometric mean.
The collar map interpolates a boundary diffeomorphism of the unit circle to
the identity across ``1 <= |z| <= r``; its Beltrami coefficient is estimated
by central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import HypothesisViolated, NotAHomeomorphism, OutOfDomain
from .moebius import INF, Moebius, apply_point, derivative

HYPOTHESIS_TOL = 1e-6
BOUND_SLACK = 1e-9
FD_STEP = 1e-4


# ------------------------------------------------------------- Grotzsch modulus


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(100):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def mu(r: float) -> float:
    """Modulus of the Grotzsch domain: unit disc minus the slit ``[0, r]``.

    ``mu(r) = (pi/2) K(r') / K(r)`` with ``r' = sqrt(1 - r^2)``; since
    ``K(k) = pi / (2 AGM(1, k'))`` this is ``(pi/2) AGM(1, r') / AGM(1, r)``.
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise OutOfDomain(f"mu needs 0 < r < 1, got {r!r}")
    rp = math.sqrt((1.0 - r) * (1.0 + r))
    return 0.5 * math.pi * agm(1.0, rp) / agm(1.0, r)


def mu_inv(m: float, tol: float = 1e-15) -> float:
    """Solve ``mu(r) = m`` by bisection on ``log r``.

    Uses the bracket ``log(1/r) < mu(r) < log(4/r)``, i.e.
    ``e^-m < r < 4 e^-m``.
    """
    m = float(m)
    if not (m > 0.0 and math.isfinite(m)):
        raise OutOfDomain(f"mu_inv needs m > 0, got {m!r}")
    lo = -m
    hi = min(math.log(4.0) - m, 0.0)
    if math.exp(lo) == 0.0:
        raise OutOfDomain(f"mu_inv({m}) underflows")
    # mu decreasing: mu(e^lo) > m > mu(e^hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
        r = math.exp(mid)
        if r >= 1.0 or mu(r) < m:
            hi = mid
        else:
            lo = mid
    return math.exp(0.5 * (lo + hi))


def inner_annulus(modW: float) -> float:
    """Inner radius ``r`` of an annulus ``{r < |z| < 1}`` inside any ``W``.

    ``W`` is a doubly connected domain in the unit disc bounded by the unit
    circle and a curve around 0 with modulus ``modW``; then ``W`` contains
    ``{r < |z| < 1}`` with ``r = mu_inv(modW)``.
    """
    return mu_inv(modW)


# ------------------------------------------------------------ derivative bound


@dataclass(frozen=True)
class Annulus:
    center: complex
    r1: float
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not 0.0 < self.r1 < self.r2:
            raise ValueError("annulus needs 0 < r1 < r2")

    @property
    def modulus(self) -> float:
        return math.log(self.r2 / self.r1)

    @property
    def core_radius(self) -> float:
        return math.sqrt(self.r1 * self.r2)

    def contains(self, z, tol: float = 0.0) -> bool:
        if z is INF:
            return False
        d = abs(z - self.center)
        return self.r1 * (1.0 - tol) <= d <= self.r2 * (1.0 + tol)


@dataclass(frozen=True)
class DerivativeBoundReport:
    max_derivative: float
    bound: float
    passed: bool
    m: float
    M: float
    r1: float
    r2: float
    samples: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _ring_points(a: Annulus, radius: float, n: int, phase: float = 0.0) -> np.ndarray:
    th = phase + 2.0 * np.pi * np.arange(n) / n
    return a.center + radius * np.exp(1j * th)


def check_derivative_bound(f: Moebius, A1: Annulus, A2: Annulus, samples: int = 64) -> DerivativeBoundReport:
    """Compare ``max |f'|`` on the core of ``A1`` with ``(4M/m)(r2/r1)``.

    ``m = mod A1``, ``M = mod A2`` and ``r1, r2`` are the core radii.  The
    hypotheses (``f`` has no pole on ``A1``, ``f(A1)`` inside ``A2``,
    ``f`` maps core to core) are checked on sample points with relative
    tolerance 1e-6.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if f.c != 0:
        pole = -f.d / f.c
        if A1.contains(pole, HYPOTHESIS_TOL):
            raise HypothesisViolated("map has a pole on the source annulus")
    n_ring = max(samples, 16)
    radii = np.geomspace(A1.r1, A1.r2, 9)
    for rad in radii:
        for z in _ring_points(A1, rad, n_ring, phase=0.1):
            w = apply_point(f, complex(z))
            if not A2.contains(w, HYPOTHESIS_TOL):
                raise HypothesisViolated(f"f({complex(z):.6g}) leaves the target annulus")
    core = _ring_points(A1, A1.core_radius, samples)
    ders = []
    for z in core:
        w = apply_point(f, complex(z))
        if w is INF or abs(abs(w - A2.center) - A2.core_radius) > HYPOTHESIS_TOL * A2.core_radius:
            raise HypothesisViolated("core circle does not map onto the target core circle")
        ders.append(abs(derivative(f, complex(z))))
    m, M = A1.modulus, A2.modulus
    bound = 4.0 * M / m * A2.core_radius / A1.core_radius
    mx = float(max(ders))
    return DerivativeBoundReport(mx, bound, mx <= bound + BOUND_SLACK, m, M, A1.core_radius, A2.core_radius, samples)


def random_annulus_instance(rng: np.random.Generator) -> tuple[Moebius, Annulus, Annulus]:
    """Random Moebius map with round source and target annuli meeting the hypotheses.

    The map is a composition of a translation to the origin, an optional
    inversion, a rotation-scaling and a translation, so it sends round
    annuli about the source center to round annuli; the target is the image
    annulus widened symmetrically about the image core.
    """
    a = complex(*rng.uniform(-3, 3, 2))
    r1 = float(rng.uniform(0.1, 2.0))
    r2 = r1 * float(np.exp(rng.uniform(0.05, 3.0)))
    A1 = Annulus(a, r1, r2)
    g = Moebius.translation(-a)
    inverted = bool(rng.integers(2))
    if inverted:
        g = Moebius(0, 1, 1, 0) @ g
    k = float(np.exp(rng.uniform(-2, 2))) * complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
    b = complex(*rng.uniform(-3, 3, 2))
    f = Moebius.translation(b) @ Moebius.scaling(k) @ g
    lo, hi = (1.0 / r2, 1.0 / r1) if inverted else (r1, r2)
    widen = float(np.exp(rng.uniform(0.0, 1.0)))
    A2 = Annulus(b, abs(k) * lo / widen, abs(k) * hi * widen)
    return f, A1, A2


# --------------------------------------------------------- collar interpolation


@dataclass(frozen=True)
class BoundaryProfile:
    """Circle diffeomorphism fixing 1, given by ``rho(theta) = |h'(e^{i theta})|``.

    ``antiderivative`` optionally gives ``P(theta) = int_0^theta rho`` in
    closed form; the collar map always integrates numerically.
    """

    rho: Callable[[float], float]
    name: str = "custom"
    antiderivative: Callable[[float], float] | None = field(default=None, compare=False)

    @classmethod
    def identity(cls) -> "BoundaryProfile":
        return cls(lambda th: 1.0, "identity", lambda th: th)

    @classmethod
    def cosine(cls, amplitude: float) -> "BoundaryProfile":
        """``rho = 1 + amplitude cos(theta)``."""
        a = float(amplitude)
        return cls(lambda th: 1.0 + a * math.cos(th), f"cosine({a!r})", lambda th: th + a * math.sin(th))

    def check(self, n: int = 512) -> tuple[float, float]:
        """Min and max of ``rho`` on a grid, after checking the total length is ``2 pi``."""
        total, _ = integrate.quad(self.rho, 0.0, 2.0 * math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
        if abs(total - 2.0 * math.pi) > 1e-8:
            raise ValueError(f"profile integrates to {total}, not 2 pi")
        vals = np.array([self.rho(t) for t in np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)])
        return float(vals.min()), float(vals.max())


class CollarMap:
    """``H(t e^{i theta}) = t exp(i Phi)`` with ``Phi = theta + lam(t)(P(theta) - theta)``.

    ``lam(t) = (r - t) / (r - 1)`` so ``H`` is the boundary map on ``|z| = 1``
    and the identity on ``|z| = r``.  ``P`` is computed by adaptive
    quadrature and cached per angle.
    """

    def __init__(self, profile: BoundaryProfile, r: float):
        self.profile = profile
        self.r = float(r)
        self._cache: dict[float, float] = {}

    def P(self, theta: float) -> float:
        theta = float(theta)
        v = self._cache.get(theta)
        if v is None:
            v, _ = integrate.quad(self.profile.rho, 0.0, theta, epsabs=1e-13, epsrel=1e-13, limit=200)
            self._cache[theta] = v
        return v

    def lam(self, t):
        return (self.r - t) / (self.r - 1.0)

    def polar(self, t: float, theta: float) -> complex:
        phi = theta + self.lam(t) * (self.P(theta) - theta)
        return t * complex(math.cos(phi), math.sin(phi))

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        return self.polar(abs(z), math.atan2(z.imag, z.real))

    def beltrami(self, z: complex, h: float = FD_STEP) -> tuple[complex, float]:
        """Beltrami coefficient and Jacobian at ``z`` by central differences."""
        fx = (self(z + h) - self(z - h)) / (2.0 * h)
        fy = (self(z + 1j * h) - self(z - 1j * h)) / (2.0 * h)
        fz = 0.5 * (fx - 1j * fy)
        fzb = 0.5 * (fx + 1j * fy)
        return fzb / fz, abs(fz) ** 2 - abs(fzb) ** 2


@dataclass
class CollarReport:
    map: CollarMap
    t: np.ndarray
    theta: np.ndarray
    abs_mu: np.ndarray
    jacobian: np.ndarray
    max_abs_mu: float
    dilatation: float
    inner_error: float
    outer_error: float

    def rows(self) -> list[dict]:
        out = []
        for i, t in enumerate(self.t):
            for j, th in enumerate(self.theta):
                out.append({"t": float(t), "theta": float(th), "abs_mu": float(self.abs_mu[i, j])})
        return out

    def to_dict(self) -> dict:
        return {
            "profile": self.map.profile.name,
            "r": self.map.r,
            "grid": [len(self.t), len(self.theta)],
            "max_abs_mu": self.max_abs_mu,
            "dilatation": self.dilatation,
            "min_jacobian": float(self.jacobian.min()),
            "inner_boundary_error": self.inner_error,
            "outer_boundary_error": self.outer_error,
            "fd_step": FD_STEP,
        }


def _gauss_legendre_antiderivative(rho, panels: int = 64, order: int = 16):
    """Reference ``int_0^theta rho`` by composite Gauss-Legendre (independent of quad)."""
    x, w = np.polynomial.legendre.leggauss(order)

    def P(theta: float) -> float:
        edges = np.linspace(0.0, theta, panels + 1)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            total += half * sum(wi * rho(0.5 * (a + b) + half * xi) for xi, wi in zip(x, w))
        return total

    return P


def collar_interpolation(profile: BoundaryProfile, r: float, grid: tuple[int, int] = (64, 64)) -> CollarReport:
    """Interpolating map on ``1 <= |z| <= r`` and its estimated dilatation.

    The angular integrand ``lam (rho - 1) + 1`` is a convex combination of
    ``rho`` and 1, so the map is a homeomorphism exactly when ``rho > 0``.
    """
    r = float(r)
    if not r > 1.0 + 1e-6:
        raise ValueError("collar needs r > 1 + 1e-6")
    lo, _ = profile.check()
    if lo <= 0.0:
        raise NotAHomeomorphism(f"profile derivative reaches {lo:.6g} <= 0")
    H = CollarMap(profile, r)
    nt, nth = grid
    ts = np.linspace(1.0, r, nt)
    ths = np.linspace(0.0, 2.0 * np.pi, nth, endpoint=False)
    abs_mu = np.empty((nt, nth))
    jac = np.empty((nt, nth))
    for i, t in enumerate(ts):
        for j, th in enumerate(ths):
            m, J = H.beltrami(t * complex(math.cos(th), math.sin(th)))
            abs_mu[i, j] = abs(m)
            jac[i, j] = J
    ref = profile.antiderivative or _gauss_legendre_antiderivative(profile.rho)
    inner = max(abs(H.polar(1.0, th) - complex(math.cos(ref(th)), math.sin(ref(th)))) for th in ths)
    outer = max(abs(H.polar(r, th) - r * complex(math.cos(th), math.sin(th))) for th in ths)
    mx = float(abs_mu.max())
    K = (1.0 + mx) / (1.0 - mx) if mx < 1.0 else math.inf
    return CollarReport(H, ts, ths, abs_mu, jac, mx, K, float(inner), float(outer))


__all__ = [
    "Annulus",
    "BoundaryProfile",
    "CollarMap",
    "CollarReport",
    "DerivativeBoundReport",
    "agm",
    "check_derivative_bound",
    "collar_interpolation",
    "inner_annulus",
    "mu",
    "mu_inv",
    "random_annulus_instance",
]
