"""Spectral models, closed-range verdicts and numerical witnesses.

The spectral models are closed-form answers for automorphism symbols;
the numerical routines (spectral-radius surrogates, witness families,
singular-value signatures and exponent fits) corroborate them on finite
sections and never replace them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import GaussianRational
from .moebius import (
    AutoKind,
    MoebiusMap,
    classify,
    compose,
    hyperbolic,
    iterate,
    rotation,
    special,
)
from .operators import composition_section, op_norm, smallest_sv
from .series import (
    TruncatedSeries,
    blaschke_taylor,
    compose_poly,
    mobius_taylor,
    power_mod,
)
from .weights import Growth, WeightSequence, classify_growth

ROOT_OF_UNITY_CAP = 10**4  # q * cap * tol must stay well below 1 or every phase "fits"
ROOT_OF_UNITY_TOL = 1e-12


class SpectrumKind(str, Enum):
    FINITE_CYCLIC = "FiniteCyclic"
    UNIT_CIRCLE = "UnitCircle"
    ANNULUS = "Annulus"
    DIAGONAL_CLOSURE = "DiagonalClosure"


@dataclass(frozen=True)
class SpectrumModel:
    kind: SpectrumKind
    points: tuple = ()
    r_in: float | None = None
    r_out: float | None = None
    multiplier: complex | None = None
    provenance: dict = field(default_factory=dict)

    def contains(self, z: complex, rtol: float = 1e-6) -> bool:
        a = abs(z)
        if self.kind is SpectrumKind.ANNULUS:
            return self.r_in * (1 - rtol) <= a <= self.r_out * (1 + rtol)
        if self.kind is SpectrumKind.FINITE_CYCLIC:
            return any(abs(z - p) <= rtol for p in self.points)
        return abs(a - 1) <= rtol

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "provenance": self.provenance}
        if self.points:
            out["points"] = [[p.real, p.imag] for p in self.points]
        if self.r_in is not None:
            out["r_in"], out["r_out"] = self.r_in, self.r_out
        if self.multiplier is not None:
            out["multiplier"] = [self.multiplier.real, self.multiplier.imag]
        return out


_QUARTER = (1 + 0j, 1j, -1 + 0j, -1j)


def roots_of_unity(q: int) -> tuple[complex, ...]:
    """The q-th roots of unity; multiples of a quarter turn are exact."""
    pts = []
    for k in range(q):
        if (4 * k) % q == 0:
            pts.append(_QUARTER[(4 * k) // q])
        else:
            pts.append(cmath.exp(2j * math.pi * k / q))
    return tuple(pts)


def detect_root_of_unity(lam: complex, cap: int = ROOT_OF_UNITY_CAP, tol: float = ROOT_OF_UNITY_TOL):
    """Return (p, q) with lam = exp(2 pi i p/q) when a denominator q <= cap fits, else None."""
    x = (cmath.phase(lam) / (2 * math.pi)) % 1.0
    frac = Fraction(x).limit_denominator(cap)
    if abs(float(frac) - x) <= tol or abs(abs(float(frac) - x) - 1.0) <= tol:
        return frac.numerator % frac.denominator, frac.denominator
    return None


def growth_exponent(order: int) -> int:
    """2N^2 + 3N + 2."""
    return 2 * order * order + 3 * order + 2


def spectrum_model(m: MoebiusMap, w: WeightSequence, probe_limit: int = 100_000) -> SpectrumModel:
    growth = classify_growth(w, probe_limit)
    if growth.classification is not Growth.POLYNOMIAL:
        raise ValueError(f"weights {w.label} are not of polynomial growth (probe)")
    cls = classify(m)
    gp = {"weights": w.label, "M_estimate": growth.m_estimate, "N": growth.order, "probe_limit": probe_limit}
    if cls.kind is AutoKind.IDENTITY:
        return SpectrumModel(SpectrumKind.FINITE_CYCLIC, (1 + 0j,), multiplier=1 + 0j, provenance={"model": "identity", **gp})
    if cls.kind is AutoKind.ELLIPTIC:
        lam = complex(cls.multiplier)
        lam /= abs(lam)
        hit = detect_root_of_unity(lam)
        prov = {"model": "elliptic:closure-of-multiplier-powers", "denominator_cap": ROOT_OF_UNITY_CAP, **gp}
        if hit is not None:
            p, q = hit
            return SpectrumModel(SpectrumKind.FINITE_CYCLIC, roots_of_unity(q), multiplier=lam, provenance={**prov, "p": p, "q": q})
        return SpectrumModel(SpectrumKind.UNIT_CIRCLE, multiplier=lam, provenance=prov)
    if cls.kind is AutoKind.PARABOLIC:
        return SpectrumModel(SpectrumKind.UNIT_CIRCLE, provenance={"model": "parabolic:unit-circle", **gp})
    r = cls.canonical_r
    e = growth_exponent(growth.order)
    r_in = ((1 - r) / (1 + r)) ** e
    return SpectrumModel(
        SpectrumKind.ANNULUS,
        r_in=r_in,
        r_out=1.0 / r_in,
        provenance={"model": "hyperbolic:annulus-bound", "r": r, "r_at_0": cls.r, "exponent": e, **gp},
    )


# -- parabolic witness ------------------------------------------------------


@dataclass(frozen=True)
class ParabolicWitness:
    m: int
    total: Fraction
    lower: Fraction

    @property
    def holds(self) -> bool:
        return self.total >= self.lower


def parabolic_witness(m_steps: int) -> ParabolicWitness:
    """Exact S(m) = sum_{n=0}^{4m} (-1)^n C(4m, n) / ((n - 2m)^2 + 1) and 2/(4m^2 + 1)."""
    if m_steps < 1:
        raise ValueError("m_steps must be >= 1")
    m = m_steps
    total = sum(Fraction((-1) ** n * math.comb(4 * m, n), (n - 2 * m) ** 2 + 1) for n in range(4 * m + 1))
    return ParabolicWitness(m, total, Fraction(2, 4 * m * m + 1))


def parabolic_orbit_at_zero(k: int) -> GaussianRational:
    """psi1^k(0) = k/(k - i); negative k gives k/(k + i) for the inverse iterates."""
    kk = GaussianRational(k)
    return kk / (kk - GaussianRational(0, 1))


# -- spectral radius surrogates -------------------------------------------------


def spectral_radius_sequence(m: MoebiusMap, w: WeightSequence, n_max: int, n: int) -> list[float]:
    """r_j = ||section of C_{m^j}||^(1/j) for j = 1..n_max."""
    cls = classify(m)
    if cls.kind is AutoKind.IDENTITY:
        return [1.0] * n_max
    out = []
    for j in range(1, n_max + 1):
        g = iterate(m, j).to_float().taylor(n - 1)
        out.append(op_norm(composition_section(g, w, n)) ** (1.0 / j))
    return out


# -- closed range ---------------------------------------------------------------


class FredholmStatus(str, Enum):
    NOT_CLOSED_RANGE = "NotClosedRange"
    SEMI_FREDHOLM = "SemiFredholm"
    FREDHOLM = "Fredholm"


@dataclass(frozen=True)
class FredholmVerdict:
    status: FredholmStatus
    order: int | None
    boundary_modulus: float
    winding: int | None
    automorphism_check: bool
    tolerance: float
    grid: int

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "order": self.order,
            "evidence": {
                "boundary_modulus": self.boundary_modulus,
                "winding": self.winding,
                "automorphism_check": self.automorphism_check,
                "tolerance": self.tolerance,
                "grid": self.grid,
            },
        }


WINDING_GUARD = 0.01


class WindingError(ValueError):
    pass


def winding_number(values: np.ndarray) -> float:
    """Total argument increment around the closed sampled curve, in turns."""
    steps = np.angle(np.roll(values, -1) / values)
    if np.max(np.abs(steps)) > math.pi / 2:
        return math.nan
    return float(np.sum(steps) / (2 * math.pi))


def robust_winding(g: TruncatedSeries, grid: int = 1024, refinements: int = 2) -> tuple[int, int]:
    """Integer winding of g on the circle, refining the grid 4x while unstable."""
    m = grid
    for _ in range(refinements + 1):
        vals = g.boundary_values(m)
        if np.min(np.abs(vals)) == 0:
            raise WindingError("symbol vanishes on the sampled circle")
        wn = winding_number(vals)
        if not math.isnan(wn) and abs(wn - round(wn)) <= WINDING_GUARD:
            return int(round(wn)), m
        m *= 4
    raise WindingError(f"winding number not within {WINDING_GUARD} of an integer after refinement to {m // 4} points")


def fredholm_verdict(g: TruncatedSeries, w: WeightSequence, tol: float = 1e-6, grid: int = 1024) -> FredholmVerdict:
    """Closed-range / semi-Fredholm / Fredholm status from inner-ness and winding."""
    growth = classify_growth(w, 4096)
    if growth.classification is not Growth.POLYNOMIAL:
        raise ValueError(f"weights {w.label} are not of polynomial growth (probe)")
    tail = g.tail_bound()
    if not math.isfinite(tail):
        raise ValueError("coefficients do not decay; symbol is not analytic on the closed disk")
    tol_eff = max(tol, 10.0 * tail)
    vals = g.boundary_values(grid)
    if np.max(np.abs(vals)) > 1 + tol_eff:
        raise ValueError("symbol does not map the disk into its closure")
    bm = float(np.max(np.abs(np.abs(vals) - 1.0)))
    if bm > tol_eff:
        try:
            wn, _ = robust_winding(g, grid)
        except WindingError:
            wn = None
        return FredholmVerdict(FredholmStatus.NOT_CLOSED_RANGE, None, bm, wn, False, tol_eff, grid)
    wn, used = robust_winding(g, grid)
    if wn < 1:
        raise ValueError(f"inner symbol with winding {wn}: not a nonconstant self-map")
    status = FredholmStatus.FREDHOLM if wn == 1 else FredholmStatus.SEMI_FREDHOLM
    return FredholmVerdict(status, wn, bm, wn, wn == 1, tol_eff, used)


def closed_range_signature(g: TruncatedSeries, w: WeightSequence, sizes: Sequence[int] = (128, 256, 512)) -> list[tuple[int, float]]:
    """Smallest singular value of the N x N/4 leading block of C_g, per N."""
    out = []
    for n in sizes:
        A = composition_section(g.truncate(n - 1), w, n, cols=n // 4)
        out.append((n, smallest_sv(A)))
    return out


# -- witness family ---------------------------------------------------------------


def witness_tau(xi: complex, t: float) -> MoebiusMap:
    """eta^-1 o sigma_t o eta, rotated so that its attracting boundary point is -xi."""
    eta = special("eta")
    base = compose(eta.inverse(), compose(special("sigma_t", t), eta))
    rot = rotation(xi)
    return compose(rot, compose(base, rot.inverse()))


def kernel_norm(z: complex, w: WeightSequence, max_terms: int = 1 << 20) -> float:
    """||K_z|| = sqrt(sum |z|^(2n) / beta_n^2), summed until the terms are negligible."""
    a2 = abs(z) ** 2
    if a2 >= 1:
        raise ValueError("kernel point must lie inside the disk")
    n = 256
    while True:
        b = w.betas(n)
        terms = a2 ** np.arange(n) / b**2
        if terms[-1] <= 1e-18 * terms.sum() or n >= max_terms:
            return float(math.sqrt(terms.sum()))
        n *= 2


@dataclass(frozen=True)
class WitnessRow:
    k: int
    norm_Cf_k: float
    root: float
    norm_f_k: float
    f_k_at_0: float


@dataclass(frozen=True)
class WitnessReport:
    rows: tuple[WitnessRow, ...]
    lower_bound: float
    epsilon: float
    min_distance: float
    params: dict

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "lower_bound": self.lower_bound,
            "epsilon": self.epsilon,
            "min_distance": self.min_distance,
            "rows": [r.__dict__ for r in self.rows],
        }


def cr_witness_family(
    g: TruncatedSeries, xi: complex, t: float, k_max: int, w: WeightSequence, n: int
) -> WitnessReport:
    """Norms of F_k = (f o g)^k and f_k = f^k with f = tau + xi.

    ``lower_bound`` is 1/||K_{rho xi}|| where tau(rho xi) = 0: then
    |f_k(rho xi)| = 1, so ||f_k|| >= lower_bound for every k.
    """
    xi = complex(xi)
    if abs(abs(xi) - 1) > 1e-12:
        raise ValueError("xi must be unimodular")
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    gb = g.boundary_values(4096)
    dist = float(np.min(np.abs(gb - xi)))
    if dist <= 1e-6 or np.max(np.abs(gb)) > 1 + 1e-9:
        raise ValueError(f"symbol image meets the excluded ball around xi (distance {dist:.3g})")
    gc = g.to_numpy().copy()
    gc[0] -= xi
    gshift = TruncatedSeries(gc)
    if robust_winding(gshift)[0] != 0:
        raise ValueError("symbol takes the value xi inside the disk")
    tau = witness_tau(xi, t)
    f = TruncatedSeries(tau.taylor(n).to_numpy() + np.eye(1, n + 1, 0)[0] * xi)
    F = compose_poly(f, g, n, tol=1e-9)
    eps = float(np.max(np.abs(F.boundary_values(4096))) + F.tail_bound())
    if eps >= 1:
        raise ValueError(f"f o g does not contract: sup |f o g| ~ {eps:.6g}")
    kk = ((1 - t) / (1 + t)) ** 2
    rho = (1 - kk) / (1 + kk)
    lower = 1.0 / kernel_norm(rho * xi, w)
    rows = []
    for k in range(1, k_max + 1):
        Fk = power_mod(F, k, n)
        fk = power_mod(f, k, n)
        ncf = Fk.norm(w)
        rows.append(WitnessRow(k, ncf, ncf ** (1.0 / k), fk.norm(w), abs(complex(fk.coeffs[0]))))
    params = {"xi": [xi.real, xi.imag], "t": t, "k_max": k_max, "weights": w.label, "N": n, "rho": rho}
    return WitnessReport(tuple(rows), lower, eps, dist, params)


# -- exponent fits --------------------------------------------------------------------


class FitKind(str, Enum):
    NORM_C = "normC"
    NORM_B = "normB"
    HYPERBOLIC = "hyperbolic"


FIT_SLACK = 0.25
HYPERBOLIC_ITERATES = 8


@dataclass(frozen=True)
class FitReport:
    kind: FitKind
    weights: str
    grid: tuple
    n: int
    growth_order: int
    exponent: float
    slope: float
    intercept: float
    xs: tuple
    ys: tuple
    slack: float = FIT_SLACK
    note: str = "slope only; the multiplicative constant is not checked"

    @property
    def passed(self) -> bool:
        return self.slope <= self.exponent + self.slack

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "weights": self.weights,
            "grid": list(self.grid),
            "N": self.n,
            "growth_order": self.growth_order,
            "exponent": self.exponent,
            "slope": self.slope,
            "intercept": self.intercept,
            "slack": self.slack,
            "pass": self.passed,
            "points": [[x, y] for x, y in zip(self.xs, self.ys)],
            "note": self.note,
        }


def exponent_fit(kind: str, w: WeightSequence, grid: Sequence[float], n: int = 256) -> FitReport:
    """Least-squares slope of a log section norm against a log distance to the boundary.

    normC: log ||C_phi|| vs -log(1 - |z0|), exponent 2N^2 + 3N + 2.
    normB: log ||C_B|| for B = z phi_{z0} vs -log(1 - |z0|), exponent N(N + 1).
    hyperbolic: log of the spectral-radius surrogate of (z + r)/(1 + r z) vs
    log((1 + r)/(1 - r)), exponent 2N^2 + 3N + 2.
    """
    kind = FitKind(kind)
    grid = tuple(float(x) for x in grid)
    if len(grid) < 4 or len(set(grid)) < 4 or not all(0 < x < 1 for x in grid):
        raise ValueError("degenerate grid: need at least 4 distinct values in (0, 1)")
    growth = classify_growth(w)
    if growth.classification is not Growth.POLYNOMIAL:
        raise ValueError(f"weights {w.label} are not of polynomial growth (probe)")
    order = growth.order
    xs, ys = [], []
    for v in grid:
        if kind is FitKind.NORM_C:
            g = mobius_taylor(v, 0.0, n - 1)
            xs.append(-math.log(1 - v))
            ys.append(math.log(op_norm(composition_section(g, w, n))))
        elif kind is FitKind.NORM_B:
            g = blaschke_taylor([0, v], 0.0, n - 1)
            xs.append(-math.log(1 - v))
            ys.append(math.log(op_norm(composition_section(g, w, n))))
        else:
            m = iterate(hyperbolic(v), HYPERBOLIC_ITERATES)
            xs.append(math.log((1 + v) / (1 - v)))
            ys.append(math.log(op_norm(composition_section(m.taylor(n - 1), w, n))) / HYPERBOLIC_ITERATES)
    slope, intercept = np.polyfit(xs, ys, 1)
    exponent = order * (order + 1) if kind is FitKind.NORM_B else growth_exponent(order)
    return FitReport(kind, w.label, grid, n, order, float(exponent), float(slope), float(intercept), tuple(xs), tuple(ys))
