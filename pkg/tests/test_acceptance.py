"""Acceptance criteria C1-C12, each at its stated tolerance and runtime budget.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import time
from fractions import Fraction

import numpy as np

from hardycomp.analysis import (
    FredholmStatus,
    SpectrumKind,
    closed_range_signature,
    cr_witness_family,
    exponent_fit,
    fredholm_verdict,
    parabolic_witness,
    spectral_radius_sequence,
    spectrum_model,
)
from hardycomp.exact import GaussianRational as G
from hardycomp.moebius import MoebiusMap, compose, hyperbolic, iterate, rotation, special
from hardycomp.operators import (
    bounds_grid,
    check_bounds,
    composition_section,
    dn_block_eigs,
    eigenvalues,
    op_norm,
    verify_f2,
)
from hardycomp.series import blaschke_taylor, mobius_taylor, polynomial
from hardycomp.weights import dirichlet, dn1, dn2, hardy


def test_c1_exact_moebius_identities(criterion):
    t0 = time.perf_counter()
    psi1, psi2 = special("psi1", exact=True), special("psi2", exact=True)
    closed = all(
        iterate(psi1, n).equals(MoebiusMap(G(n, 1), G(-n), G(n), G(-n, 1))) for n in range(1, 101)
    )
    inverse = compose(psi1, psi2).is_identity()
    conj = True
    for n in range(1, 51):
        tau = special("tau_n", n, exact=True)
        conj &= compose(tau, compose(psi1, tau.inverse())).equals(iterate(psi1, n))
    elapsed = time.perf_counter() - t0
    criterion(
        "C1",
        "exact Moebius identities",
        {"closed forms n<=100": closed, "psi1 o psi2 = id": inverse, "tau_n conjugation n<=50": conj, "runtime < 1s": elapsed < 1},
        f"{elapsed:.2f}s",
    )


def test_c2_f2_identity(criterion):
    t0 = time.perf_counter()
    h512 = verify_f2(hardy(), 0.4, 512, 32)
    d512 = verify_f2(dirichlet(1), 0.4, 512, 32)
    # the float residual sits at roundoff for both sizes, so the halving
    # clause is read off the exact-arithmetic residual
    halving = {}
    for w in (hardy(), dirichlet(1)):
        r512 = verify_f2(w, Fraction(2, 5), 512, 32, exact=True).log10_residual
        r1024 = verify_f2(w, Fraction(2, 5), 1024, 32, exact=True).log10_residual
        halving[w.label] = (r512, r1024)
    elapsed = time.perf_counter() - t0
    checks = {
        "hardy < 1e-8": h512.residual < 1e-8,
        "dirichlet < 1e-6": d512.residual < 1e-6,
        **{f"halving {k}": b <= a - math.log10(2) for k, (a, b) in halving.items()},
        "runtime < 2min": elapsed < 120,
    }
    detail = f"hardy {h512.residual:.2e}, dirichlet {d512.residual:.2e}, log10 512/1024 hardy {halving['hardy'][0]:.1f}/{halving['hardy'][1]:.1f}"
    criterion("C2", "(F2) identity", checks, detail)


def test_c3_dn_eigenvalues_and_block_bounds(criterion):
    t0 = time.perf_counter()
    eigs = dn_block_eigs(1.0, 0.5) == (2.25, 0.25)
    reports = [r for z0 in (0.2, 0.4, 0.6) for wn in (0.5, 1.0, 2.0) for r in check_bounds("a", z0=z0, w_n=wn)]
    worst = min(r.slack for r in reports)
    elapsed = time.perf_counter() - t0
    checks = {
        "eigs {2.25, 0.25}": eigs,
        "block bounds slack >= 0": all(r.passed for r in reports),
        "runtime < 1s": elapsed < 1,
    }
    criterion("C3", "D_n eigenvalues and block norm bounds", checks, f"worst slack {worst:.3g}")


def test_c4_elliptic_spectra(criterion):
    g = rotation(1j).taylor(63)
    diag = True
    for w in (hardy(), dirichlet(1), dn1(2), dn2(2)):
        A = composition_section(g, w, 64).to_numpy()
        diag &= np.array_equal(A, np.diag(1j ** np.arange(64)))
    model = spectrum_model(rotation(1j), hardy())
    cyclic = model.kind is SpectrumKind.FINITE_CYCLIC and set(model.points) == {1, 1j, -1, -1j}
    criterion("C4", "elliptic spectra", {"diagonal i^n": bool(diag), "FiniteCyclic 4th roots": cyclic})


def test_c5_parabolic_witness(criterion):
    t0 = time.perf_counter()
    ok = all(parabolic_witness(m).holds for m in range(1, 51))
    s1 = parabolic_witness(1).total == Fraction(12, 5)
    elapsed = time.perf_counter() - t0
    criterion("C5", "parabolic witness sums", {"S(m) >= 2/(4m^2+1), m<=50": ok, "S(1) = 12/5": s1, "runtime < 30s": elapsed < 30})


def test_c6_parabolic_spectral_radius(criterion):
    t0 = time.perf_counter()
    r = spectral_radius_sequence(special("psi1"), hardy(), 32, 512)
    elapsed = time.perf_counter() - t0
    tail = r[7:]
    mono = all(b <= a + 1e-3 for a, b in zip(tail, tail[1:]))
    checks = {"r_32 <= 1.3": r[31] <= 1.3, "nonincreasing n >= 8": mono, "runtime < 3min": elapsed < 180}
    criterion("C6", "parabolic spectral-radius surrogate", checks, f"r_8 {r[7]:.4f}, r_32 {r[31]:.4f}")


def test_c7_hyperbolic_annulus(criterion):
    t0 = time.perf_counter()
    m = hyperbolic(0.5)
    ev = np.abs(eigenvalues(composition_section(m.taylor(255), hardy(), 256)))
    lo, hi = (1 / 9) * (1 - 1e-6), 9 * (1 + 1e-6)
    inside = bool(np.all((ev >= lo) & (ev <= hi)))
    r16 = spectral_radius_sequence(m, hardy(), 16, 512)[15]
    elapsed = time.perf_counter() - t0
    checks = {"eigenvalues in [1/9, 9]": inside, "r_16 <= 9.45": r16 <= 9 * 1.05, "runtime < 1min": elapsed < 60}
    detail = f"eigenvalue moduli in [{ev.min():.2e}, {ev.max():.3f}], {int(np.sum(ev < lo))} of 256 below 1/9; r_16 {r16:.3f}"
    criterion("C7", "hyperbolic annulus", checks, detail)


def test_c8_norm_bounds_suite(criterion):
    t0 = time.perf_counter()
    reports = bounds_grid(n=256)
    elapsed = time.perf_counter() - t0
    by_formula = {}
    for r in reports:
        fam = r.formula_id.split(".")[0]
        by_formula.setdefault(fam, []).append(r.passed)
    checks = {f"({k}) slack >= 0": all(v) for k, v in sorted(by_formula.items())}
    checks["runtime < 5min"] = elapsed < 300
    npass = sum(r.passed for r in reports)
    criterion("C8", "norm bounds suite", checks, f"{npass}/{len(reports)} reports pass")


def test_c9_fredholm_verdicts(criterion):
    t0 = time.perf_counter()
    w = hardy()
    v1 = fredholm_verdict(mobius_taylor(0.5, 0.0, 256), w)
    v2 = fredholm_verdict(blaschke_taylor([0, 0.5], 0.0, 256), w)
    v3 = fredholm_verdict(polynomial([0.5, 0.5]), w)
    v4 = fredholm_verdict(polynomial([0, 0.5]), w)
    elapsed = time.perf_counter() - t0
    checks = {
        "phi_0.5 Fredholm": v1.status is FredholmStatus.FREDHOLM,
        "B_0 SemiFredholm(2)": v2.status is FredholmStatus.SEMI_FREDHOLM and v2.order == 2,
        "(1+z)/2 NotClosedRange": v3.status is FredholmStatus.NOT_CLOSED_RANGE,
        "z/2 NotClosedRange": v4.status is FredholmStatus.NOT_CLOSED_RANGE,
        "runtime < 1min": elapsed < 60,
    }
    criterion("C9", "Fredholm verdicts", checks)


def test_c10_closed_range_signature(criterion):
    t0 = time.perf_counter()
    sizes = (128, 256, 512)
    bad = [s for _, s in closed_range_signature(polynomial([0.5, 0.5]), hardy(), sizes)]
    good = [s for _, s in closed_range_signature(blaschke_taylor([0, 0.5], 0.0, 512), hardy(), sizes)]
    elapsed = time.perf_counter() - t0
    checks = {
        "(1+z)/2 halves per doubling": all(b <= a / 2 for a, b in zip(bad, bad[1:])),
        "B_0 above 0.5": min(good) >= 0.5,
        "runtime < 2min": elapsed < 120,
    }
    criterion("C10", "closed-range signature", checks, f"(1+z)/2 {bad[-1]:.1e} at 512, B_0 min {min(good):.4f}")


def test_c11_witness_family(criterion):
    t0 = time.perf_counter()
    rep = cr_witness_family(polynomial([0, 0.5]), 1.0, 0.5, 20, hardy(), 512)
    elapsed = time.perf_counter() - t0
    roots = [r.root for r in rep.rows if r.k >= 10]
    checks = {
        "root <= 0.95 for k >= 10": max(roots) <= 0.95,
        "norm_f_k >= lower bound": all(r.norm_f_k >= rep.lower_bound for r in rep.rows),
        "runtime < 2min": elapsed < 120,
    }
    criterion("C11", "witness family", checks, f"max root {max(roots):.3f}, lower bound {rep.lower_bound:.3f}")


def test_c12_exponent_fits_and_convergence(criterion):
    t0 = time.perf_counter()
    grid = (0.5, 0.6, 0.7, 0.8, 0.9)
    fh = exponent_fit("normC", hardy(), grid)
    fd = exponent_fit("normC", dirichlet(1), grid)
    sigma = op_norm(composition_section(mobius_taylor(0.5, 0.0, 2047), hardy(), 2048))
    elapsed = time.perf_counter() - t0
    checks = {
        "hardy slope": fh.passed,
        "dirichlet slope": fd.passed,
        "sigma_max within 1% of sqrt(3)": abs(sigma / math.sqrt(3) - 1) <= 0.01,
        "runtime < 10min": elapsed < 600,
    }
    detail = f"slopes {fh.slope:.3f} <= {fh.exponent:g}+0.25, {fd.slope:.3f} <= {fd.exponent:g}+0.25; sigma/sqrt3 {sigma / math.sqrt(3):.6f}"
    criterion("C12", "exponent fits and norm convergence", checks, detail)
