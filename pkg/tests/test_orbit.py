import math

import numpy as np
import pytest

from schottky.config import CirclePair, CircleSystem, validate
from schottky.errors import BudgetExceeded, NotAdmissible
from schottky.moebius import INF, Moebius, OrientedCircle, apply_circle, chordal_circle_deviation
from schottky.orbit import (
    Word,
    ball_size,
    census_large,
    diameter_profile,
    enumerate_words,
    level_size,
    limit_set_sample,
    maximal_chains,
    sample_words,
    translated_circles,
    word_map,
)

from conftest import ring_system


def test_word_reduction_and_signs():
    w = Word.from_signed((1, -2, 1))
    assert w.letters == (0, 3, 0) and w.signed() == (1, -2, 1)
    assert str(w) == "g1 g2^-1 g1"
    with pytest.raises(ValueError):
        Word.from_signed((1, -2, 2))
    with pytest.raises(ValueError):
        Word((0, 1))
    with pytest.raises(ValueError):
        Word.from_signed((0,))


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("n", range(1, 7))
def test_word_counts(k, n):
    words = enumerate_words(k, n)
    assert len(words) == sum(2 * k * (2 * k - 1) ** (m - 1) for m in range(1, n + 1))
    assert len(set(words)) == len(words)
    assert len(words) == ball_size(k, n) - 1
    assert len(sample_words(k, n)) == level_size(k, n)
    # shortlex: by length, then lexicographic
    keys = [(len(w), w.letters) for w in words]
    assert keys == sorted(keys)


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_words(3, 6, budget=100)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_edge_and_chain_counts(k):
    s = ring_system(k)
    for n in (1, 2, 3, 4):
        tcs = translated_circles(s, n)
        assert len(tcs) == 2 * k * sum((2 * k - 1) ** (m - 1) for m in range(1, n + 1))
        assert [t.depth for t in tcs] == sorted(t.depth for t in tcs)
        chains = maximal_chains(s, n)
        assert len(chains) == 2 * k * (2 * k - 1) ** (n - 1)
        assert all(len(c.circles) == n for c in chains)


def test_depth_zero_returns_base_circles(two_pairs):
    tcs = translated_circles(two_pairs, 0)
    assert len(tcs) == 4
    assert {t.circle for t in tcs} == set(two_pairs.circles())


def test_translated_circles_are_images(two_pairs):
    for t in translated_circles(two_pairs, 4):
        assert t.check(two_pairs)
        img = apply_circle(word_map(two_pairs, t.word), t.base_circle(two_pairs))
        assert chordal_circle_deviation(img, t.circle) < 1e-8


def test_chains_are_nested(two_pairs):
    for ch in maximal_chains(two_pairs, 5):
        assert ch.is_nested()
        d = ch.diameters()
        assert np.all(np.diff(d) < 0)


def test_covariance_under_conjugation(two_pairs):
    m = Moebius(1, 0.2 + 0.1j, 0.05j, 1)
    moved = two_pairs.transformed(m)
    a = translated_circles(two_pairs, 4)
    b = translated_circles(moved, 4)
    assert [t.word for t in a] == [t.word for t in b]
    for ta, tb in zip(a, b):
        assert chordal_circle_deviation(apply_circle(m, ta.circle), tb.circle) <= 1e-8


def test_parallel_results_identical(two_pairs):
    a = translated_circles(two_pairs, 5, workers=1)
    b = translated_circles(two_pairs, 5, workers=4)
    assert a == b
    assert diameter_profile(two_pairs, 6, workers=1) == diameter_profile(two_pairs, 6, workers=3)
    assert limit_set_sample(two_pairs, 5, workers=1) == limit_set_sample(two_pairs, 5, workers=4)


def test_one_pair_diameter_ratio(one_pair):
    # for a single pair the diameters along a chain shrink by the inverse multiplier
    prof = diameter_profile(one_pair, 8)
    mx = np.array(prof.max_diam)
    ratio = mx[-1] / mx[-2]
    assert ratio == pytest.approx(math.exp(-math.acosh(7.0)), rel=1e-6)
    assert prof.count == (2,) * 8


def test_profile_verdict_needs_three_depths(two_pairs):
    assert not diameter_profile(two_pairs, 2).fundamental_domain_plausible
    assert diameter_profile(two_pairs, 8).fundamental_domain_plausible


def test_census_counts_match_brute_force(two_pairs):
    M = 0.05
    c = census_large(two_pairs, 6, M)
    from schottky.moebius import spherical_diameter

    tcs = translated_circles(two_pairs, 6)
    for d, n in zip(c.depths, c.counts):
        assert n == sum(1 for t in tcs if t.depth == d and spherical_diameter(t.circle) > M)
    assert c.cumulative[-1] == sum(c.counts)
    assert c.stable_from is not None


def test_census_budget(two_pairs):
    with pytest.raises(BudgetExceeded):
        census_large(two_pairs, 12, 1e-9, budget=1000)


def test_limit_points_inside_first_letter_disc(two_pairs):
    pts = limit_set_sample(two_pairs, 4)
    words = sample_words(two_pairs.k, 4)
    lc = two_pairs.letter_circles()
    assert len(pts) == len(words)
    for z, w in zip(pts, words):
        assert z is not INF and lc[w.letters[0]].contains(z)


def test_inadmissible_rejected():
    bad = CircleSystem((CirclePair(OrientedCircle(0, 1), OrientedCircle(0.5, 1), Moebius.identity()),))
    for fn in (translated_circles, limit_set_sample):
        with pytest.raises(NotAdmissible):
            fn(bad, 2)
