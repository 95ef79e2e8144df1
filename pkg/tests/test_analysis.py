import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardycomp.analysis import (
    FitKind,
    FredholmStatus,
    SpectrumKind,
    WindingError,
    closed_range_signature,
    cr_witness_family,
    detect_root_of_unity,
    exponent_fit,
    fredholm_verdict,
    growth_exponent,
    kernel_norm,
    parabolic_orbit_at_zero,
    parabolic_witness,
    robust_winding,
    roots_of_unity,
    spectral_radius_sequence,
    spectrum_model,
    winding_number,
    witness_tau,
)
from hardycomp.exact import GaussianRational as G
from hardycomp.moebius import compose, disk_automorphism, hyperbolic, iterate, rotation, special
from hardycomp.operators import composition_section
from hardycomp.series import TruncatedSeries, blaschke_taylor, mobius_taylor, polynomial
from hardycomp.weights import custom, dirichlet, dn1, hardy

# -- spectrum models --------------------------------------------------------------


def test_rotation_by_i_is_finite_cyclic():
    model = spectrum_model(rotation(1j), hardy())
    assert model.kind is SpectrumKind.FINITE_CYCLIC
    assert set(model.points) == {1, 1j, -1, -1j}
    assert model.to_json()["kind"] == "FiniteCyclic"


def test_irrational_rotation_is_unit_circle():
    model = spectrum_model(rotation(cmath.exp(2j * math.pi * math.sqrt(2))), hardy())
    assert model.kind is SpectrumKind.UNIT_CIRCLE


def test_parabolic_is_unit_circle():
    assert spectrum_model(special("psi1"), dirichlet(1)).kind is SpectrumKind.UNIT_CIRCLE


def test_hyperbolic_annulus_on_hardy():
    # exponent 2N^2 + 3N + 2 = 2 at N = 0, so ((1 - r)/(1 + r))^2 = 1/9
    model = spectrum_model(hyperbolic(0.5), hardy())
    assert model.kind is SpectrumKind.ANNULUS
    assert model.r_in == pytest.approx(1 / 9)
    assert model.r_out == pytest.approx(9)
    assert model.contains(1.0) and not model.contains(10.0)


def test_hyperbolic_annulus_exponent_tracks_growth():
    # dn1(1) has w_1 = 2, so the growth estimate is 2 and the exponent 2*4 + 6 + 2
    model = spectrum_model(hyperbolic(0.5), dn1(1))
    assert model.provenance["N"] == 2
    assert model.provenance["exponent"] == growth_exponent(2) == 16
    assert model.r_out == pytest.approx(3.0**16)


def test_spectrum_model_rejects_intermediate_growth():
    w = custom([1.0], tail=lambda k: 1 + 1 / np.sqrt(k))
    with pytest.raises(ValueError):
        spectrum_model(hyperbolic(0.5), w)


def test_roots_of_unity():
    assert roots_of_unity(4) == (1, 1j, -1, -1j)
    pts = roots_of_unity(6)
    np.testing.assert_allclose(np.array(pts) ** 6, 1, atol=1e-14)
    assert detect_root_of_unity(cmath.exp(2j * math.pi * 3 / 7)) == (3, 7)
    assert detect_root_of_unity(cmath.exp(2j * math.pi * math.sqrt(3))) is None


def test_elliptic_section_eigenvalues_are_multiplier_powers():
    lam = cmath.exp(0.7j)
    A = composition_section(rotation(lam).taylor(15), dn1(1), 16).to_numpy()
    np.testing.assert_allclose(np.diag(A), lam ** np.arange(16), atol=1e-14)
    assert np.count_nonzero(A - np.diag(np.diag(A))) == 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False))
def test_spectrum_model_is_conjugation_invariant(theta, a):
    tau = disk_automorphism(theta, a)
    for m in (special("psi1"), hyperbolic(0.5)):
        conj = compose(tau, compose(m, tau.inverse()))
        m1, m2 = spectrum_model(m, hardy(), 1000), spectrum_model(conj, hardy(), 1000)
        assert m1.kind is m2.kind
        if m1.kind is SpectrumKind.ANNULUS:
            assert m2.r_in == pytest.approx(m1.r_in, rel=1e-8)


# -- parabolic witness ------------------------------------------------------------


def test_parabolic_witness_first_term():
    pw = parabolic_witness(1)
    assert pw.total == Fraction(12, 5) and pw.lower == Fraction(2, 5) and pw.holds


def test_parabolic_orbit_at_zero():
    assert parabolic_orbit_at_zero(3) == G(Fraction(9, 10), Fraction(3, 10))
    assert parabolic_orbit_at_zero(-3) == G(Fraction(9, 10), Fraction(-3, 10))
    psi1 = special("psi1", exact=True)
    assert iterate(psi1, 5)(0) == parabolic_orbit_at_zero(5)
    with pytest.raises(ValueError):
        parabolic_witness(0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40))
def test_parabolic_witness_positive(m):
    pw = parabolic_witness(m)
    assert pw.total > 0 and pw.holds


# -- spectral radius surrogates ---------------------------------------------------


def test_spectral_radius_of_rotation_is_one():
    r = spectral_radius_sequence(rotation(cmath.exp(0.3j)), hardy(), 5, 32)
    np.testing.assert_allclose(r, 1.0, atol=1e-14)


def test_spectral_radius_of_psi1_small():
    r = spectral_radius_sequence(special("psi1"), hardy(), 6, 128)
    assert all(x >= 1.0 for x in r)
    assert r[-1] < r[0]


# -- Fredholm verdicts -----------------------------------------------------------


@pytest.mark.parametrize(
    "g,status,order",
    [
        (mobius_taylor(0.5, 0.0, 256), FredholmStatus.FREDHOLM, 1),
        (blaschke_taylor([0, 0.5], 0.0, 256), FredholmStatus.SEMI_FREDHOLM, 2),
        (blaschke_taylor([0.1, -0.3j, 0.6], 1.0, 400), FredholmStatus.SEMI_FREDHOLM, 3),
        (polynomial([0.5, 0.5]), FredholmStatus.NOT_CLOSED_RANGE, None),
        (polynomial([0, 0.5]), FredholmStatus.NOT_CLOSED_RANGE, None),
    ],
)
def test_fredholm_verdicts(g, status, order):
    v = fredholm_verdict(g, hardy())
    assert v.status is status and v.order == order
    if status is not FredholmStatus.NOT_CLOSED_RANGE:
        assert v.boundary_modulus <= v.tolerance and v.winding == order
    assert v.automorphism_check == (status is FredholmStatus.FREDHOLM)


def test_fredholm_errors():
    with pytest.raises(ValueError):
        fredholm_verdict(polynomial([0.3, 0.9]), hardy())
    with pytest.raises(ValueError):
        fredholm_verdict(TruncatedSeries(np.ones(64)), hardy())
    with pytest.raises(ValueError):
        fredholm_verdict(polynomial([1.0]), hardy())


def test_winding_helpers():
    theta = 2 * np.pi * np.arange(256) / 256
    assert winding_number(np.exp(3j * theta)) == pytest.approx(3)
    assert robust_winding(polynomial([0, 0, 1]))[0] == 2
    with pytest.raises(WindingError):
        robust_winding(polynomial([1, 1]), grid=4)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * math.pi), st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False), st.floats(0, 2 * math.pi))
def test_fredholm_rotation_invariance(theta, a, rot):
    g = mobius_taylor(a, theta, 300)
    v = fredholm_verdict(g, hardy())
    assert v.status is FredholmStatus.FREDHOLM
    # post-rotation multiplies coefficients by a unit; pre-rotation scales c_k by u^k
    u = cmath.exp(1j * rot)
    post = TruncatedSeries(u * g.to_numpy())
    pre = TruncatedSeries(g.to_numpy() * u ** np.arange(len(g.coeffs)))
    assert fredholm_verdict(post, hardy()).status is v.status
    assert fredholm_verdict(pre, hardy()).status is v.status


def test_closed_range_signatures():
    bad = closed_range_signature(polynomial([0.5, 0.5]), hardy(), (64, 128))
    good = closed_range_signature(blaschke_taylor([0, 0.5], 0.0, 128), hardy(), (64, 128))
    assert bad[1][1] < bad[0][1] / 2
    assert min(s for _, s in good) > 0.5


# -- witness family --------------------------------------------------------------


def test_witness_tau_geometry():
    tau = witness_tau(1.0, 0.5)
    # rho = 0.8 is sent to 0 for t = 1/2
    assert abs(tau(0.8)) < 1e-15
    assert kernel_norm(0.8, hardy()) == pytest.approx(1 / 0.6)


def test_witness_family_decays():
    rep = cr_witness_family(polynomial([0, 0.5]), 1.0, 0.5, 12, hardy(), 256)
    assert rep.lower_bound == pytest.approx(0.6)
    norms = [r.norm_Cf_k for r in rep.rows]
    assert all(b <= a for a, b in zip(norms[2:], norms[3:]))
    for r in rep.rows:
        assert r.norm_f_k >= rep.lower_bound
        assert r.norm_f_k >= r.f_k_at_0
    assert rep.epsilon < 1


def test_witness_family_rejects_symbols_reaching_xi():
    with pytest.raises(ValueError):
        cr_witness_family(polynomial([0.5, 0.5]), 1.0, 0.5, 3, hardy(), 64)
    with pytest.raises(ValueError):
        cr_witness_family(polynomial([0, 0.5]), 2.0, 0.5, 3, hardy(), 64)


# -- exponent fits ---------------------------------------------------------------


def test_fit_hardy_normc_is_near_one_half():
    rep = exponent_fit("normC", hardy(), (0.5, 0.6, 0.7, 0.8), n=128)
    assert rep.kind is FitKind.NORM_C and rep.exponent == 2.0
    assert rep.passed
    assert 0.3 < rep.slope < 0.7


def test_fit_normb_hardy_is_flat():
    rep = exponent_fit("normB", hardy(), (0.1, 0.3, 0.5, 0.7), n=64)
    assert abs(rep.slope) < 1e-8 and rep.passed


def test_fit_grid_validation():
    with pytest.raises(ValueError):
        exponent_fit("normC", hardy(), (0.5, 0.5, 0.6, 0.7))
    with pytest.raises(ValueError):
        exponent_fit("normC", hardy(), (0.5, 0.6, 1.2, 0.7))
    with pytest.raises(ValueError):
        exponent_fit("bogus", hardy(), (0.5, 0.6, 0.7, 0.8))
