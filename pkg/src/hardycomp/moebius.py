"""Moebius maps z -> (az + b)/(cz + d) as projective 2x2 matrices.

Composition is the matrix product, inverses use the adjugate, and iterates use
binary powers.  Entries are either complex floats or ``GaussianRational``;
exact maps keep identities such as closed-form iterates free of rounding.

Canonical representative:
  float  -- determinant scaled to 1, then the sign fixed so the first
            non-negligible entry has positive real part (or is positive
            imaginary).
  exact  -- every entry divided by the first nonzero one (a square root of
            the determinant is generally not rational).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .exact import GaussianRational, is_exact_scalar
from .series import TruncatedSeries

INFINITY = complex(math.inf, 0.0)
_DET_SNAP = 1e-14


def is_infinite(z) -> bool:
    return cmath.isinf(complex(z))


class NotAutomorphismError(ValueError):
    pass


class ClassificationError(ValueError):
    pass


def _all_exact(xs) -> bool:
    return any(isinstance(x, (GaussianRational, Fraction)) for x in xs) and all(is_exact_scalar(x) for x in xs)


def _canonical_float(a, b, c, d):
    a, b, c, d = (complex(x) for x in (a, b, c, d))
    scale = max(abs(a), abs(b), abs(c), abs(d))
    det = a * d - b * c
    if scale == 0 or abs(det) <= 1e-300 or abs(det) <= 1e-14 * scale * scale:
        raise ValueError("degenerate Moebius matrix (ad - bc = 0)")
    if abs(det - 1) > _DET_SNAP:
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
        scale = max(abs(a), abs(b), abs(c), abs(d))
    for x in (a, b, c, d):
        if abs(x) > 1e-12 * scale:
            if x.real < 0 or (x.real == 0 and x.imag < 0):
                a, b, c, d = -a, -b, -c, -d
            break
    return a, b, c, d


def _canonical_exact(a, b, c, d):
    a, b, c, d = (GaussianRational.coerce(x) for x in (a, b, c, d))
    if (a * d - b * c).is_zero():
        raise ValueError("degenerate Moebius matrix (ad - bc = 0)")
    lead = next(x for x in (a, b, c, d) if not x.is_zero())
    if lead == 1:
        return a, b, c, d
    return a / lead, b / lead, c / lead, d / lead


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """(az + b)/(cz + d), stored as its canonical representative."""

    a: complex | GaussianRational
    b: complex | GaussianRational
    c: complex | GaussianRational
    d: complex | GaussianRational

    def __post_init__(self):
        raw = (self.a, self.b, self.c, self.d)
        entries = _canonical_exact(*raw) if _all_exact(raw) else _canonical_float(*raw)
        for name, v in zip("abcd", entries):
            object.__setattr__(self, name, v)

    @classmethod
    def from_matrix(cls, mat) -> "MoebiusMap":
        (a, b), (c, d) = mat
        return cls(a, b, c, d)

    @property
    def exact(self) -> bool:
        return isinstance(self.a, GaussianRational)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def matrix(self) -> np.ndarray:
        return np.array([[complex(self.a), complex(self.b)], [complex(self.c), complex(self.d)]])

    def to_float(self) -> "MoebiusMap":
        return MoebiusMap(*(complex(x) for x in self.entries)) if self.exact else self

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        if is_infinite(z):
            return INFINITY if _is_zero(self.c) else complex(self.a) / complex(self.c)
        if self.exact and is_exact_scalar(z):
            z = GaussianRational.coerce(z)
            den = self.c * z + self.d
            if den.is_zero():
                return INFINITY
            return (self.a * z + self.b) / den
        a, b, c, d = (complex(x) for x in self.entries)
        den = c * z + d
        if den == 0:
            return INFINITY
        return (a * z + b) / den

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def is_identity(self, tol: float = 0.0) -> bool:
        if self.exact:
            return self.b.is_zero() and self.c.is_zero() and self.a == self.d
        a, b, c, d = self.entries
        return abs(b) <= tol and abs(c) <= tol and abs(a - d) <= tol

    def distance(self, other: "MoebiusMap") -> float:
        """Projective distance: sine of the angle between the two matrices as C^4 vectors."""
        if self.exact and other.exact:
            x, y = self.entries, other.entries
            if all((x[i] * y[j] - x[j] * y[i]).is_zero() for i in range(4) for j in range(i + 1, 4)):
                return 0.0
        u = np.array([complex(x) for x in self.entries])
        v = np.array([complex(x) for x in other.entries])
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        # Lagrange identity: sin^2 = sum of |2x2 minors|^2, free of 1 - cos^2 cancellation
        minors = np.outer(u, v) - np.outer(v, u)
        return float(np.sqrt(np.sum(np.abs(minors) ** 2) / 2))

    def equals(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        """Projective equality; exact maps compare with zero tolerance."""
        if self.exact and other.exact:
            return self.distance(other) == 0.0
        return self.distance(other) <= tol

    def taylor(self, n: int = 256) -> TruncatedSeries:
        """Taylor coefficients at 0: c_0 = b/d, c_k = det/d^2 * (-c/d)^(k-1)."""
        if _is_zero(self.d):
            raise ValueError("map has a pole at 0")
        if self.exact:
            q = -self.c / self.d
            lead = self.det / (self.d * self.d)
            out = [self.b / self.d]
            p = GaussianRational(1)
            for _ in range(n):
                out.append(lead * p)
                p = p * q
            sup = 1.0 if is_disk_automorphism(self) else None
            return TruncatedSeries(tuple(out), 1.0, sup)
        a, b, c, d = (complex(x) for x in self.entries)
        q = -c / d
        if abs(q) >= 1:
            raise ValueError("pole lies in the closed unit disk")
        co = np.empty(n + 1, dtype=complex)
        co[0] = b / d
        co[1:] = (a * d - b * c) / (d * d) * q ** np.arange(n)
        sup = 1.0 if is_disk_automorphism(self) else None
        return TruncatedSeries(co, 1.0, sup)

    def __repr__(self):
        return f"MoebiusMap({self.a}, {self.b}, {self.c}, {self.d})"


def _is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, GaussianRational):
        return x.is_zero()
    return abs(x) <= tol


def _mixed(m1: MoebiusMap, m2: MoebiusMap):
    if m1.exact != m2.exact:
        return m1.to_float(), m2.to_float()
    return m1, m2


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """m1 o m2 (apply m2 first)."""
    m1, m2 = _mixed(m1, m2)
    a1, b1, c1, d1 = m1.entries
    a2, b2, c2, d2 = m2.entries
    return MoebiusMap(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def identity(exact: bool = False) -> MoebiusMap:
    one, zero = (GaussianRational(1), GaussianRational(0)) if exact else (1.0, 0.0)
    return MoebiusMap(one, zero, zero, one)


def iterate(m: MoebiusMap, n: int) -> MoebiusMap:
    """n-th iterate; negative n iterates the inverse."""
    if n < 0:
        m, n = m.inverse(), -n
    result = identity(m.exact)
    base = m
    while n:
        if n & 1:
            result = compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def disk_automorphism(theta: float, z0) -> MoebiusMap:
    """e^{i theta} (z0 - z)/(1 - conj(z0) z)."""
    if abs(complex(z0)) >= 1:
        raise ValueError(f"|z0| must be < 1, got {abs(complex(z0))}")
    if isinstance(z0, (GaussianRational, Fraction)):
        from .series import _unit

        u = _unit(theta, True)
        z = GaussianRational.coerce(z0)
        return MoebiusMap(-u, u * z, -z.conjugate(), GaussianRational(1))
    u = cmath.exp(1j * theta)
    z = complex(z0)
    return MoebiusMap(-u, u * z, -z.conjugate(), 1.0)


def rotation(lam) -> MoebiusMap:
    """z -> lam z."""
    if isinstance(lam, (GaussianRational, Fraction)):
        return MoebiusMap(GaussianRational.coerce(lam), GaussianRational(0), GaussianRational(0), GaussianRational(1))
    return MoebiusMap(complex(lam), 0.0, 0.0, 1.0)


def hyperbolic(r) -> MoebiusMap:
    """(z + r)/(1 + r z), attracting fixed point 1 and repelling -1."""
    if not 0 < float(r) < 1:
        raise ValueError("hyperbolic canonical form needs 0 < r < 1")
    if isinstance(r, Fraction):
        one = GaussianRational(1)
        return MoebiusMap(one, GaussianRational(r), GaussianRational(r), one)
    return MoebiusMap(1.0, float(r), float(r), 1.0)


def special(name: str, param=None, exact: bool = False) -> MoebiusMap:
    """The named maps psi1, psi2, tau_n, eta and sigma_t.

    ``eta`` sends the disk to the right half-plane and ``sigma_t`` scales that
    half-plane; neither is a disk automorphism.
    """
    G = GaussianRational if exact else (lambda re, im=0: complex(re, im))
    key = name.lower()
    if key == "psi1":
        return MoebiusMap(G(1, 1), G(-1), G(1), G(-1, 1))
    if key == "psi2":
        return MoebiusMap(G(1, -1), G(-1), G(1), G(-1, -1))
    if key in ("tau_n", "tau"):
        n = param
        if n is None or n < 1:
            raise ValueError("tau_n needs n >= 1")
        if exact:
            n = Fraction(n)
        return MoebiusMap(G(n + 1), G(n - 1), G(n - 1), G(n + 1))
    if key == "eta":
        return MoebiusMap(G(1), G(1), G(-1), G(1))
    if key in ("sigma_t", "sigma"):
        t = param
        if t is None or not 0 < t < 1:
            raise ValueError("sigma_t needs 0 < t < 1")
        if exact:
            t = Fraction(t)
        k = ((1 - t) / (1 + t)) ** 2
        return MoebiusMap(G(k), G(0), G(0), G(1))
    raise ValueError(f"unknown special map {name!r}; expected psi1, psi2, tau_n, eta or sigma_t")


# -- geometry ----------------------------------------------------------------


def is_disk_automorphism(m: MoebiusMap, tol: float = 1e-9) -> bool:
    """True when M^H J M = k J with k > 0 and J = diag(1, -1)."""
    a, b, c, d = m.entries
    if m.exact:
        h11 = a.abs2() - c.abs2()
        h22 = b.abs2() - d.abs2()
        h12 = a.conjugate() * b - c.conjugate() * d
        return h12.is_zero() and h11 == -h22 and h11 > 0
    a, b, c, d = (complex(x) for x in (a, b, c, d))
    h11 = abs(a) ** 2 - abs(c) ** 2
    h22 = abs(b) ** 2 - abs(d) ** 2
    h12 = a.conjugate() * b - c.conjugate() * d
    scale = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
    return abs(h12) <= tol * scale and abs(h11 + h22) <= tol * scale and h11 > tol * scale


def derivative_at(m: MoebiusMap, z):
    """m'(z) = (ad - bc)/(cz + d)^2."""
    if m.exact and is_exact_scalar(z):
        den = m.c * GaussianRational.coerce(z) + m.d
        if den.is_zero():
            raise ValueError("derivative requested at the pole")
        return m.det / (den * den)
    a, b, c, d = (complex(x) for x in m.entries)
    den = c * complex(z) + d
    if den == 0:
        raise ValueError("derivative requested at the pole")
    return (a * d - b * c) / (den * den)


def second_coefficient_at(m: MoebiusMap, z) -> complex:
    """m''(z)/2 = -c (ad - bc)/(cz + d)^3."""
    a, b, c, d = (complex(x) for x in m.entries)
    den = c * complex(z) + d
    return -c * (a * d - b * c) / den**3


def fixed_points(m: MoebiusMap) -> tuple[complex, ...]:
    """Roots of c z^2 + (d - a) z - b with multiplicity; infinity when c = 0."""
    if m.is_identity(0.0 if m.exact else 1e-15):
        raise ValueError("the identity fixes every point")
    a, b, c, d = m.entries
    scale = max(abs(complex(x)) for x in m.entries)
    if _is_zero(c, 1e-15 * scale):
        if _is_zero(d - a, 1e-15 * scale):
            return (INFINITY, INFINITY)
        return (complex(b / (d - a)), INFINITY)
    disc = (d - a) * (d - a) + 4 * b * c
    af, df, cf = complex(a), complex(d), complex(c)
    if _is_zero(disc, 1e-15 * (abs(complex(d - a)) ** 2 + 4 * abs(complex(b * c)))):
        z = (af - df) / (2 * cf)
        return (z, z)
    # cancellation-free form: q = -(B + s sqrt(disc))/2, roots q/A and C/q
    B, C = df - af, -complex(b)
    sq = cmath.sqrt(complex(disc))
    if (B.conjugate() * sq).real < 0:
        sq = -sq
    q = -(B + sq) / 2
    if q == 0:
        return (0j, 0j)
    return (q / cf, C / q)


# -- classification ----------------------------------------------------------


class AutoKind(str, Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"
    IDENTITY = "Identity"


@dataclass(frozen=True)
class AutoClass:
    """Elliptic / parabolic / hyperbolic type with its fixed-point data.

    ``multiplier`` is m'(alpha) at the interior fixed point (elliptic), 1
    (parabolic) or m'(xi) at the attracting fixed point (hyperbolic).
    ``r`` is |m(0)| and ``canonical_r`` the parameter of the conjugate
    (z + r)/(1 + r z); both are set only for hyperbolic maps.
    """

    kind: AutoKind
    fixed_points: tuple
    multiplier: complex = 1.0
    r: float | None = None
    canonical_r: float | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "fixed_points": [_point_json(z) for z in self.fixed_points],
            "multiplier": [complex(self.multiplier).real, complex(self.multiplier).imag],
            "r": self.r,
            "canonical_r": self.canonical_r,
        }


def _point_json(z):
    z = complex(z)
    return "inf" if cmath.isinf(z) else [z.real, z.imag]


AMBIGUITY_FACTOR = 100.0


def trace_invariant(m: MoebiusMap):
    """delta = tr^2/det - 4: negative elliptic, zero parabolic, positive hyperbolic."""
    tr = m.a + m.d
    return tr * tr / m.det - 4


def classify(m: MoebiusMap, tol: float = 1e-9) -> AutoClass:
    if not is_disk_automorphism(m, tol):
        raise NotAutomorphismError("map is not an automorphism of the unit disk")
    if m.is_identity(0.0 if m.exact else tol):
        return AutoClass(AutoKind.IDENTITY, ())
    delta = trace_invariant(m)
    if m.exact:
        dv = delta.re
        kind = AutoKind.PARABOLIC if dv == 0 else (AutoKind.ELLIPTIC if dv < 0 else AutoKind.HYPERBOLIC)
    else:
        dv = complex(delta).real
        # delta is quadratic in the distance from the identity; measure it
        # against that distance so near-identity maps are not called parabolic
        a, b, c, d = (complex(x) for x in m.entries)
        scale = (abs(a - d) ** 2 + abs(b) ** 2 + abs(c) ** 2) / abs(a * d - b * c)
        if abs(dv) <= tol * scale:
            kind = AutoKind.PARABOLIC
        elif abs(dv) <= AMBIGUITY_FACTOR * tol * scale:
            raise ClassificationError(f"trace invariant {dv:.3e} is too close to the parabolic boundary at tol={tol:g}")
        else:
            kind = AutoKind.ELLIPTIC if dv < 0 else AutoKind.HYPERBOLIC

    mf = m.to_float()
    if kind is AutoKind.PARABOLIC:
        fp = fixed_points(m)
        xi = (fp[0] + fp[1]) / 2
        xi /= abs(xi)
        return AutoClass(kind, (xi, xi), 1.0)
    if kind is AutoKind.ELLIPTIC:
        fp = fixed_points(m)
        inner = [z for z in fp if not is_infinite(z) and abs(z) < 1]
        if len(inner) != 1:
            raise ClassificationError("elliptic map without a unique interior fixed point")
        alpha = inner[0]
        outer = fp[1] if fp[0] is alpha or fp[0] == alpha else fp[0]
        return AutoClass(kind, (alpha, outer), complex(derivative_at(mf, alpha)))
    fp = fixed_points(m)
    fp = tuple(z / abs(z) for z in fp)
    mults = [abs(derivative_at(mf, z)) for z in fp]
    order = sorted(range(2), key=lambda i: mults[i])
    xa, xr = fp[order[0]], fp[order[1]]
    mu = mults[order[0]]
    r = abs(complex(mf(0.0)))
    return AutoClass(kind, (xa, xr), complex(derivative_at(mf, xa)), r, (1 - mu) / (1 + mu))


@dataclass(frozen=True)
class Conjugation:
    tau: MoebiusMap
    canonical: MoebiusMap
    residual: float
    target: str

    def __iter__(self):
        return iter((self.tau, self.canonical))


def _three_point(z1, z2, z3) -> MoebiusMap:
    """Map sending z1, z2, z3 to 0, 1, infinity."""
    return MoebiusMap(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


CONJUGATION_TOL = 1e-9


def canonical_conjugator(m: MoebiusMap, tol: float = 1e-9) -> Conjugation:
    """tau with tau o m o tau^-1 equal to the canonical form of m's class."""
    cls = classify(m, tol)
    mf = m.to_float()
    if cls.kind is AutoKind.IDENTITY:
        raise ValueError("the identity has no canonical conjugator")
    if cls.kind is AutoKind.ELLIPTIC:
        alpha = cls.fixed_points[0]
        tau = identity() if abs(alpha) < 1e-15 else disk_automorphism(0.0, alpha)
        canonical = rotation(cls.multiplier)
        target = "rotation"
    elif cls.kind is AutoKind.PARABOLIC:
        xi = cls.fixed_points[0]
        rot = rotation(xi.conjugate())
        m1 = compose(rot, compose(mf, rot.inverse()))
        c2 = second_coefficient_at(m1, 1.0)
        k = 1.0 / abs(c2.imag)
        # scaling by k in the half-plane picture, pulled back to the disk
        scale = MoebiusMap(k + 1, k - 1, k - 1, k + 1)
        tau = compose(scale, rot)
        target = "psi1" if c2.imag > 0 else "psi2"
        canonical = special(target)
    else:
        xa, xr = cls.fixed_points
        ta = cmath.phase(xa)
        span = (cmath.phase(xr) - ta) % (2 * math.pi)
        mid = cmath.exp(1j * (ta + span / 2))
        tau = compose(_three_point(1.0, 1j, -1.0).inverse(), _three_point(xa, mid, xr))
        canonical = hyperbolic(cls.canonical_r)
        target = "hyperbolic"
    conj = compose(tau, compose(mf, tau.inverse()))
    residual = conj.distance(canonical)
    if residual > CONJUGATION_TOL:
        raise ClassificationError(f"conjugation residual {residual:.3e} exceeds {CONJUGATION_TOL:g}")
    return Conjugation(tau, canonical, residual, target)
