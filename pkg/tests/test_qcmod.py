import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import ellipk, ellipkm1

from schottky.errors import HypothesisViolated, NotAHomeomorphism, OutOfDomain
from schottky.moebius import Moebius
from schottky.qcmod import (
    Annulus,
    BoundaryProfile,
    CollarMap,
    agm,
    check_derivative_bound,
    collar_interpolation,
    inner_annulus,
    mu,
    mu_inv,
    random_annulus_instance,
)

# ------------------------------------------------------------ modulus


def test_agm_against_mpmath():
    for a, b in ((1.0, 0.5), (1.0, 1e-6), (3.0, 2.0)):
        assert agm(a, b) == pytest.approx(float(mpmath.agm(a, b)), rel=1e-14)


@pytest.mark.parametrize("r", [1e-6, 0.01, 0.3, 1 / math.sqrt(2), 0.9, 0.999999])
def test_mu_against_elliptic_integrals(r):
    # scipy takes the parameter k^2; ellipkm1(p) = K at parameter 1 - p, exact for small p
    expected = 0.5 * math.pi * ellipkm1(r * r) / ellipk(r * r)
    assert mu(r) == pytest.approx(expected, rel=1e-12)
    with mpmath.workdps(40):
        R = mpmath.mpf(r)
        mp = mpmath.pi / 2 * mpmath.ellipk(1 - R ** 2) / mpmath.ellipk(R ** 2)
    assert mu(r) == pytest.approx(float(mp), rel=1e-13)


def test_mu_self_dual_point():
    assert abs(mu(1 / math.sqrt(2)) - math.pi / 2) < 1e-14


@given(st.floats(0.001, 0.999))
def test_mu_functional_identity(r):
    assert abs(mu(r) * mu(math.sqrt(1 - r * r)) - math.pi ** 2 / 4) < 1e-10


def test_mu_strictly_decreasing_and_bracketed():
    rs = np.linspace(0.01, 0.99, 200)
    vals = [mu(r) for r in rs]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    for r, v in zip(rs, vals):
        assert math.log(1 / r) < v < math.log(4 / r)


@given(st.floats(1e-6, 1 - 1e-9))
def test_mu_inv_recovers_r(r):
    assert abs(mu_inv(mu(r)) - r) < 1e-12


@given(st.floats(0.5, 30))
def test_mu_inv_round_trip(m):
    # below m ~ 0.5 the solution r is within 1e-8 of 1 and mu(r) is not resolvable in doubles
    assert abs(mu(mu_inv(m)) - m) < 1e-10 * m


def test_inner_annulus_is_mu_inv():
    assert inner_annulus(2.0) == mu_inv(2.0)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.5, float("nan")])
def test_mu_domain(bad):
    with pytest.raises(OutOfDomain):
        mu(bad)


def test_mu_inv_domain():
    with pytest.raises(OutOfDomain):
        mu_inv(-1.0)


# ---------------------------------------------------------- derivative bound


def test_seeded_bound_run_has_no_violation():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(300):
        f, a1, a2 = random_annulus_instance(rng)
        rep = check_derivative_bound(f, a1, a2)
        assert rep.passed
        worst = max(worst, rep.max_derivative / rep.bound)
    assert worst < 1.0


def test_scaling_bound_is_explicit():
    # z -> 2z on 1 < |z| < e, target 1 < |z| < 4e^2: derivative 2, bound 4*M/m*core ratio
    f = Moebius.scaling(2.0)
    a1, a2 = Annulus(0, 1.0, math.e), Annulus(0, 2.0 / math.e, 2 * math.e ** 2)
    rep = check_derivative_bound(f, a1, a2)
    assert rep.max_derivative == pytest.approx(2.0)
    assert rep.bound == pytest.approx(4 * 3.0 / 1.0 * 2.0)


def test_hypotheses_enforced():
    a1 = Annulus(0, 1.0, 2.0)
    with pytest.raises(HypothesisViolated):
        check_derivative_bound(Moebius(0, 1, 1, -1.5), a1, Annulus(0, 0.1, 10))
    with pytest.raises(HypothesisViolated):
        check_derivative_bound(Moebius.scaling(3.0), a1, Annulus(0, 1.0, 2.0))
    with pytest.raises(HypothesisViolated):
        check_derivative_bound(Moebius.translation(0.5), a1, Annulus(0, 0.1, 10))


# ------------------------------------------------------------------ collar


def _analytic_abs_mu(a, r, t, th):
    """|mu| of H = t e^{i Phi} for rho = 1 + a cos."""
    lam = (r - t) / (r - 1)
    phi_th = 1 + lam * a * math.cos(th)
    t_phi_t = -t * a * math.sin(th) / (r - 1)
    num = abs(complex(1 - phi_th, t_phi_t))
    den = abs(complex(1 + phi_th, t_phi_t))
    return num / den


def test_collar_matches_closed_form():
    a, r = 0.5, math.e
    H = CollarMap(BoundaryProfile.cosine(a), r)
    for t in np.linspace(1, r, 9):
        for th in np.linspace(0, 2 * math.pi, 13, endpoint=False):
            lam = (r - t) / (r - 1)
            exact = t * complex(math.cos(th + lam * a * math.sin(th)), math.sin(th + lam * a * math.sin(th)))
            assert abs(H.polar(t, th) - exact) < 1e-12


def test_collar_beltrami_against_analytic():
    a, r = 0.5, math.e
    H = CollarMap(BoundaryProfile.cosine(a), r)
    for t in (1.1, 1.7, 2.5):
        for th in (0.3, 1.9, 4.0):
            m, _ = H.beltrami(t * complex(math.cos(th), math.sin(th)))
            assert abs(abs(m) - _analytic_abs_mu(a, r, t, th)) < 1e-6


def test_collar_identity_profile_is_conformal():
    rep = collar_interpolation(BoundaryProfile.identity(), 2.0, (16, 16))
    assert rep.max_abs_mu < 1e-6
    assert rep.inner_error < 1e-12 and rep.outer_error < 1e-12


def test_collar_jacobian_positive():
    rep = collar_interpolation(BoundaryProfile.cosine(0.5), math.e, (100, 100))
    assert rep.jacobian.min() > 0
    assert rep.max_abs_mu < 1


def test_dilatation_shrinks_with_amplitude():
    K = [collar_interpolation(BoundaryProfile.cosine(a), math.e, (24, 24)).dilatation for a in (0.4, 0.2, 0.1, 0.05)]
    assert all(b < a for a, b in zip(K, K[1:]))
    assert K[-1] > 1


def test_collar_rejects_bad_input():
    with pytest.raises(NotAHomeomorphism):
        collar_interpolation(BoundaryProfile.cosine(1.5), 2.0, (4, 4))
    with pytest.raises(ValueError):
        collar_interpolation(BoundaryProfile.cosine(0.1), 1.0, (4, 4))
    with pytest.raises(ValueError):
        BoundaryProfile(lambda th: 2.0).check()
