import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from schottky.errors import DiscsOverlapOrNested, ImageIsLine, IsIdentity
from schottky.moebius import (
    INF,
    Moebius,
    MoebiusClass,
    OrientedCircle,
    apply_circle,
    apply_point,
    chordal_circle_deviation,
    chordal_distance,
    classify,
    derivative,
    fixed_points,
    inversive_distance,
    is_great_circle,
    limit_points,
    pair_circles,
    plane_distance,
    spherical_diameter,
)

coord = st.floats(-5, 5, allow_nan=False)
cplx = st.builds(complex, coord, coord)


@st.composite
def moebius(draw):
    a, b, c, d = (draw(cplx) for _ in range(4))
    assume(abs(a * d - b * c) > 0.1)
    return Moebius(a, b, c, d)


@st.composite
def disjoint_pair(draw):
    c1 = OrientedCircle(draw(cplx), draw(st.floats(0.05, 2)))
    c2 = OrientedCircle(draw(cplx), draw(st.floats(0.05, 2)))
    assume(inversive_distance(c1, c2) > 1.0 + 1e-3)
    return c1, c2


# ------------------------------------------------------------------ maps


def test_normalized_determinant():
    g = Moebius(2, 3, 1, 4)
    assert abs(g.a * g.d - g.b * g.c - 1) < 1e-14


def test_singular_rejected():
    with pytest.raises(ValueError):
        Moebius(1, 2, 2, 4)


@given(moebius(), moebius(), moebius())
def test_composition_associative(f, g, h):
    assert ((f @ g) @ h).isclose(f @ (g @ h), 1e-7)


@given(moebius(), cplx)
def test_inverse_undoes(g, z):
    w = apply_point(g, z)
    assume(w is not INF and abs(w) < 1e6)
    back = apply_point(g.inverse(), w)
    assert back is not INF and abs(back - z) <= 1e-7 * max(1.0, abs(z))


@given(moebius(), moebius(), cplx)
def test_composition_acts_in_order(f, g, z):
    gz = apply_point(g, z)
    assume(gz is not INF and abs(gz) < 1e6)
    lhs = apply_point(f @ g, z)
    rhs = apply_point(f, gz)
    assume(lhs is not INF and rhs is not INF and abs(rhs) < 1e6)
    assert abs(lhs - rhs) <= 1e-6 * max(1.0, abs(rhs))


def test_infinity_handling():
    g = Moebius(1, 2, 3, 7)
    assert apply_point(g, INF) == pytest.approx(1 / 3)
    assert apply_point(g, -7 / 3) is INF
    assert apply_point(Moebius.translation(1), INF) is INF


def test_derivative_matches_difference_quotient():
    g = Moebius(1 + 1j, 2, 0.5, 3)
    z, h = 0.3 - 0.2j, 1e-6
    fd = (apply_point(g, z + h) - apply_point(g, z - h)) / (2 * h)
    assert abs(derivative(g, z) - fd) < 1e-7


# --------------------------------------------------------- classification


@pytest.mark.parametrize(
    "g, kind",
    [
        (Moebius.identity(), MoebiusClass.IDENTITY),
        (Moebius.translation(1), MoebiusClass.PARABOLIC),
        (Moebius.scaling(1j), MoebiusClass.ELLIPTIC),
        (Moebius.scaling(2), MoebiusClass.LOXODROMIC),
        (Moebius.scaling(2 * cmath.exp(0.5j)), MoebiusClass.LOXODROMIC),
    ],
)
def test_classify(g, kind):
    assert classify(g).kind is kind


def test_classification_band_resolves_to_boundary():
    # trace^2 within 1e-10 of 4 counts as parabolic
    g = Moebius.from_matrix([[1 + 1e-11, 1], [0, 1 / (1 + 1e-11)]])
    assert abs(classify(g).trace_squared - 4) < 1e-10
    assert classify(g).kind is MoebiusClass.PARABOLIC


def test_multiplier_oracle_mpmath():
    g = Moebius(3, 1 + 1j, 2, 1.5)
    m = mpmath.matrix([[g.a, g.b], [g.c, g.d]])
    ev = mpmath.eig(m)[0]
    big = max(ev, key=abs)
    k = complex(big) ** 2
    assert abs(classify(g).multiplier - k) < 1e-10 * abs(k)


def test_fixed_points_scaling():
    att, rep = fixed_points(Moebius.scaling(2))
    assert att is INF and rep == 0
    att, rep = fixed_points(Moebius.scaling(0.5))
    assert att == 0 and rep is INF


def test_identity_has_no_fixed_point_pair():
    with pytest.raises(IsIdentity):
        fixed_points(Moebius.identity())


@given(cplx, cplx, st.floats(1.1, 50), st.floats(-3, 3))
def test_from_fixed_points_round_trip(a, r, mod, arg):
    assume(abs(a - r) > 0.1)
    k = mod * cmath.exp(1j * arg)
    g = Moebius.from_fixed_points(a, r, k)
    att, rep = fixed_points(g)
    assert abs(att - a) < 1e-6 * (1 + abs(a))
    assert abs(rep - r) < 1e-6 * (1 + abs(r))
    assert abs(classify(g).multiplier - k) < 1e-6 * abs(k)


# ------------------------------------------------------------------ circles


def test_inversion_of_circle():
    c = apply_circle(Moebius(0, 1, 1, 0), OrientedCircle(3, 1))
    assert abs(c.center - 3 / 8) < 1e-15 and abs(c.radius - 1 / 8) < 1e-15


def test_image_through_pole_is_line():
    with pytest.raises(ImageIsLine):
        apply_circle(Moebius(0, 1, 1, 0), OrientedCircle(1, 1))


@given(moebius(), cplx, st.floats(0.1, 3))
def test_apply_circle_maps_points(g, p, r):
    circ = OrientedCircle(p, r)
    try:
        img = apply_circle(g, circ)
    except ImageIsLine:
        return
    assume(img.radius < 1e5)
    for z in circ.points(5, 0.2):
        w = apply_point(g, complex(z))
        assume(w is not INF)
        assert abs(abs(w - img.center) - img.radius) <= 1e-6 * max(1.0, img.radius, abs(img.center))


def test_chordal_metric_values():
    assert chordal_distance(0, INF) == 2.0
    assert chordal_distance(1, -1) == pytest.approx(2.0)
    assert chordal_distance(INF, INF) == 0.0


@given(cplx, cplx, cplx)
def test_chordal_triangle_inequality(a, b, c):
    assert chordal_distance(a, c) <= chordal_distance(a, b) + chordal_distance(b, c) + 1e-12


@given(cplx, st.floats(0.01, 5))
def test_spherical_diameter_matches_brute_force(p, r):
    c = OrientedCircle(p, r)
    pts = c.points(720)
    z = pts[:, None]
    w = pts[None, :]
    d = 2 * np.abs(z - w) / np.sqrt((1 + np.abs(z) ** 2) * (1 + np.abs(w) ** 2))
    assert spherical_diameter(c) == pytest.approx(d.max(), rel=1e-4)
    assert spherical_diameter(c) <= 2.0 + 1e-12


def test_great_circle():
    assert is_great_circle(OrientedCircle(0, 1))
    assert is_great_circle(OrientedCircle(1, math.sqrt(2)))
    assert not is_great_circle(OrientedCircle(0, 0.5))
    assert spherical_diameter(OrientedCircle(1, math.sqrt(2))) == pytest.approx(2.0)


# ----------------------------------------------------- distances and pairing


def test_inversive_distance_concentric_and_apart():
    assert inversive_distance(OrientedCircle(-2, 1), OrientedCircle(2, 1)) == pytest.approx(7.0)
    nested = plane_distance(OrientedCircle(0, math.e), OrientedCircle(0, 1))
    assert nested.hyperbolic == pytest.approx(1.0)


def test_plane_distance_rejects_intersecting():
    with pytest.raises(DiscsOverlapOrNested):
        plane_distance(OrientedCircle(0, 1), OrientedCircle(1.5, 1))


@given(disjoint_pair(), moebius())
def test_inversive_distance_is_moebius_invariant(pair, g):
    c1, c2 = pair
    try:
        i1, i2 = apply_circle(g, c1), apply_circle(g, c2)
    except ImageIsLine:
        return
    assume(max(i1.radius, i2.radius) < 1e4 and min(i1.radius, i2.radius) > 1e-4)
    before = inversive_distance(c1, c2)
    after = inversive_distance(i1, i2)
    assert abs(abs(after) - before) <= 1e-6 * before


def test_worked_pairing():
    g = pair_circles(OrientedCircle(-2, 1), OrientedCircle(2, 1))
    att, rep = fixed_points(g)
    assert abs(att - math.sqrt(3)) < 1e-10 and abs(rep + math.sqrt(3)) < 1e-10
    assert abs(classify(g).multiplier - (7 + 4 * math.sqrt(3))) < 1e-9 * (7 + 4 * math.sqrt(3))
    assert abs(apply_point(g, -1) - 1) < 1e-10


@given(disjoint_pair(), st.floats(-3, 3))
def test_pairing_contract(pair, twist):
    c, cp = pair
    g = pair_circles(c, cp, twist)
    assert chordal_circle_deviation(apply_circle(g, c), cp) < 1e-8
    assert cp.contains(apply_point(g, INF))
    assert classify(g).is_loxodromic
    # the inverse has the same multiplier at its own attracting point
    inv = pair_circles(cp, c, twist)
    assert inv.isclose(g.inverse(), 1e-6)


@given(disjoint_pair())
def test_limit_points_are_inverse_points(pair):
    c1, c2 = pair
    p, q = limit_points(c1, c2)
    for c in (c1, c2):
        # p and q are symmetric with respect to both circles
        assert abs(abs(p - c.center) * abs(q - c.center) - c.radius ** 2) < 1e-7 * max(1.0, c.radius ** 2)
    assert c1.contains(p) and c2.contains(q)
