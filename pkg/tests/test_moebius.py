import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hardycomp.exact import GaussianRational as G
from hardycomp.moebius import (
    INFINITY,
    AutoKind,
    ClassificationError,
    MoebiusMap,
    canonical_conjugator,
    classify,
    compose,
    derivative_at,
    disk_automorphism,
    fixed_points,
    hyperbolic,
    identity,
    is_disk_automorphism,
    is_infinite,
    iterate,
    rotation,
    special,
)


def test_canonical_form_is_projective():
    m1 = MoebiusMap(1, 2, 3, 4)
    m2 = MoebiusMap(-2, -4, -6, -8)
    assert m1.distance(m2) < 1e-15 and m1.equals(m2)
    e1 = MoebiusMap(G(1), G(2), G(3), G(4))
    e2 = MoebiusMap(G(3), G(6), G(9), G(12))
    assert e1.entries == e2.entries and e1.distance(e2) == 0.0


def test_evaluation_and_pole():
    m = MoebiusMap(1, 0, 1, -1)  # z / (z - 1)
    assert m(2) == pytest.approx(2)
    assert is_infinite(m(1))
    assert m(INFINITY) == pytest.approx(1)
    e = special("psi1", exact=True)
    assert e(0) == G(1) / G(-1, 1) * G(-1)


def test_psi1_iterates_closed_form_exact():
    psi1 = special("psi1", exact=True)
    for n in (1, 2, 7, 40):
        closed = MoebiusMap(G(n, 1), G(-n), G(n), G(-n, 1))
        assert iterate(psi1, n).equals(closed)
    assert compose(psi1, special("psi2", exact=True)).is_identity()
    assert iterate(psi1, -3).equals(iterate(special("psi2", exact=True), 3))
    assert iterate(psi1, 0).is_identity()


def test_tau_conjugation_exact():
    psi1 = special("psi1", exact=True)
    for n in (1, 3, 12):
        tau = special("tau_n", n, exact=True)
        assert compose(tau, compose(psi1, tau.inverse())).equals(iterate(psi1, n))


def test_special_errors():
    with pytest.raises(ValueError):
        special("tau_n", 0)
    with pytest.raises(ValueError):
        special("sigma_t", 1.5)
    with pytest.raises(ValueError):
        special("phi")


def test_disk_automorphism_form():
    m = disk_automorphism(0.4, 0.3 + 0.2j)
    z = 0.1 - 0.5j
    expected = cmath.exp(0.4j) * ((0.3 + 0.2j) - z) / (1 - (0.3 - 0.2j) * z)
    assert m(z) == pytest.approx(expected)
    assert is_disk_automorphism(m)
    assert not is_disk_automorphism(special("eta"))
    with pytest.raises(ValueError):
        disk_automorphism(0.0, 1.0)


def test_exact_disk_automorphism():
    m = disk_automorphism(0.0, Fraction(1, 2))
    assert m.exact and is_disk_automorphism(m)
    assert m(Fraction(1, 2)) == G(0)


@pytest.mark.parametrize(
    "m,kind",
    [
        (rotation(1j), AutoKind.ELLIPTIC),
        (disk_automorphism(1.0, 0.3), AutoKind.ELLIPTIC),
        (special("psi1"), AutoKind.PARABOLIC),
        (special("psi2", exact=True), AutoKind.PARABOLIC),
        (hyperbolic(0.5), AutoKind.HYPERBOLIC),
        (hyperbolic(Fraction(1, 3)), AutoKind.HYPERBOLIC),
        (identity(), AutoKind.IDENTITY),
    ],
)
def test_classification(m, kind):
    assert classify(m).kind is kind


def test_classify_rejects_non_automorphisms_and_ambiguity():
    with pytest.raises(ValueError):
        classify(special("eta"))
    # psi1 o h_eps is hyperbolic with delta ~ 4 eps^2, inside the ambiguity band here
    near = compose(special("psi1"), hyperbolic(3e-4))
    with pytest.raises(ClassificationError):
        classify(near, tol=1e-9)
    assert classify(compose(special("psi1"), hyperbolic(1e-2))).kind is AutoKind.HYPERBOLIC


def test_near_identity_hyperbolic_is_not_parabolic():
    cls = classify(hyperbolic(1e-8))
    assert cls.kind is AutoKind.HYPERBOLIC
    assert sorted(z.real for z in cls.fixed_points) == pytest.approx([-1, 1])


def test_parabolic_fixed_point_is_one():
    cls = classify(special("psi1"))
    assert cls.fixed_points[0] == pytest.approx(1)
    assert cls.to_json()["kind"] == "Parabolic"


def test_hyperbolic_fixed_points_ordering():
    cls = classify(hyperbolic(0.5))
    xa, xr = cls.fixed_points
    assert xa == pytest.approx(1) and xr == pytest.approx(-1)
    m = hyperbolic(0.5)
    assert abs(derivative_at(m, xa)) < 1 < abs(derivative_at(m, xr))
    assert cls.canonical_r == pytest.approx(0.5)


def test_elliptic_multiplier():
    m = disk_automorphism(0.0, 0.0)  # z -> -z
    cls = classify(m)
    assert cls.multiplier == pytest.approx(-1)
    assert abs(cls.fixed_points[0]) < 1e-15


def test_fixed_points_solve_the_equation():
    for m in (disk_automorphism(0.7, 0.4 - 0.1j), hyperbolic(0.3), special("psi2")):
        for z in fixed_points(m):
            if not is_infinite(z):
                assert abs(m(z) - z) < 1e-12


def test_conjugator_targets():
    assert canonical_conjugator(special("psi1")).target == "psi1"
    assert canonical_conjugator(special("psi2")).target == "psi2"
    c = canonical_conjugator(iterate(special("psi1"), 5))
    # for psi1^n the conjugator is tau_n^-1
    assert c.target == "psi1"
    assert c.tau.distance(special("tau_n", 5).inverse()) < 1e-12
    with pytest.raises(ValueError):
        canonical_conjugator(identity())


def test_hyperbolic_conjugate_recovers_r():
    m = compose(disk_automorphism(0.3, 0.2j), compose(hyperbolic(0.4), disk_automorphism(0.3, 0.2j).inverse()))
    conj = canonical_conjugator(m)
    assert conj.target == "hyperbolic"
    assert classify(conj.canonical).canonical_r == pytest.approx(0.4, abs=1e-12)


unit = st.floats(0, 2 * math.pi, allow_nan=False)
inside = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)


@settings(max_examples=150, deadline=None)
@given(unit, inside, unit, inside)
def test_compositions_of_automorphisms_are_automorphisms(t1, a1, t2, a2):
    m = compose(disk_automorphism(t1, a1), disk_automorphism(t2, a2))
    assert is_disk_automorphism(m)


@settings(max_examples=200, deadline=None)
@given(unit, inside)
def test_conjugator_residual(theta, a):
    m = disk_automorphism(theta, a)
    try:
        conj = canonical_conjugator(m)
    except ClassificationError:
        assume(False)
    assert conj.residual < 1e-9


@settings(max_examples=100, deadline=None)
@given(unit, inside, st.sampled_from([special("psi1"), special("psi2"), hyperbolic(0.5), rotation(cmath.exp(1j))]))
def test_class_is_conjugation_invariant(theta, a, m):
    tau = disk_automorphism(theta, a)
    conj = compose(tau, compose(m, tau.inverse()))
    assert classify(conj).kind is classify(m).kind


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 100))
def test_iterates_of_psi1_stay_parabolic(n):
    assert classify(iterate(special("psi1", exact=True), n)).kind is AutoKind.PARABOLIC


@settings(max_examples=80, deadline=None)
@given(unit, inside)
def test_taylor_matches_map(theta, a):
    m = disk_automorphism(theta, a)
    s = m.taylor(4000)
    z = np.array([0.0, 0.2j, -0.3 + 0.1j])
    np.testing.assert_allclose(s(z), [m(x) for x in z], atol=1e-10)
