"""Truncated complex power series c_0 + c_1 z + ... + c_N z^N.

Two backings share one type: complex128 arrays (default) and tuples of
``GaussianRational`` for exact identity work.  Exact products are delegated to
FLINT rational polynomials; float products use direct convolution so results
are bit-stable for a given input.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import flint
import numpy as np

from .exact import GaussianRational, from_flint, is_exact_scalar, mul_low_pair, to_flint

DEFAULT_N = 256
MIN_DECAY_LENGTH = 8


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Taylor coefficients through degree N with optional sup metadata.

    ``sup_hint`` bounds |f| on the circle of radius ``radius_hint``; when set,
    every coefficient obeys the Cauchy estimate |c_n| <= sup_hint / radius_hint**n.
    """

    coeffs: np.ndarray | tuple
    radius_hint: float = 1.0
    sup_hint: float | None = None

    def __post_init__(self):
        c = self.coeffs
        if isinstance(c, tuple) and c and all(isinstance(x, GaussianRational) for x in c):
            pass
        elif (
            isinstance(c, (list, tuple))
            and any(isinstance(x, (GaussianRational, Fraction)) for x in c)
            and all(is_exact_scalar(x) for x in c)
        ):
            object.__setattr__(self, "coeffs", tuple(GaussianRational.coerce(x) for x in c))
        else:
            arr = np.array(c, dtype=complex).reshape(-1)
            if arr.size == 0:
                raise ValueError("a series needs at least one coefficient")
            if not np.all(np.isfinite(arr)):
                raise ValueError("series coefficients must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, "coeffs", arr)
        if self.radius_hint <= 0:
            raise ValueError("radius_hint must be positive")

    # -- basic views -------------------------------------------------------

    @property
    def exact(self) -> bool:
        return isinstance(self.coeffs, tuple)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def to_numpy(self) -> np.ndarray:
        if self.exact:
            return np.array([complex(c) for c in self.coeffs], dtype=complex)
        return self.coeffs

    def to_exact(self) -> "TruncatedSeries":
        if self.exact:
            return self
        return TruncatedSeries(tuple(GaussianRational.coerce(complex(c)) for c in self.coeffs), self.radius_hint, self.sup_hint)

    def truncate(self, n: int) -> "TruncatedSeries":
        """Cut or zero-pad to degree bound n."""
        if self.exact:
            c = self.coeffs[: n + 1] + (GaussianRational(0),) * max(0, n + 1 - len(self.coeffs))
            return TruncatedSeries(c, self.radius_hint, self.sup_hint)
        out = np.zeros(n + 1, dtype=complex)
        m = min(n + 1, len(self.coeffs))
        out[:m] = self.coeffs[:m]
        return TruncatedSeries(out, self.radius_hint, self.sup_hint)

    def __call__(self, z):
        c = self.to_numpy()
        return np.polyval(c[::-1], z)

    def boundary_values(self, m: int = 1024) -> np.ndarray:
        """Exact evaluation of the polynomial at the m-th roots of unity.

        Coefficients are folded modulo m first, so any degree is handled.
        """
        c = self.to_numpy()
        folded = np.zeros(m, dtype=complex)
        np.add.at(folded, np.arange(len(c)) % m, c)
        return m * np.fft.ifft(folded)

    def derivative(self) -> "TruncatedSeries":
        if len(self.coeffs) == 1:
            return TruncatedSeries([0j] if not self.exact else (GaussianRational(0),))
        if self.exact:
            return TruncatedSeries(tuple(c * k for k, c in enumerate(self.coeffs) if k > 0))
        k = np.arange(1, len(self.coeffs))
        return TruncatedSeries(self.coeffs[1:] * k)

    def norm(self, w=None) -> float:
        """H^2_beta norm of the truncation; ``w=None`` means the Hardy space."""
        c = np.abs(self.to_numpy())
        if w is not None:
            c = c * w.betas(len(c))
        return float(np.sqrt(np.sum(c * c)))

    # -- tail metadata -----------------------------------------------------

    def decay_ratio(self) -> float:
        """Geometric decay rate of |c_n| read off the last two quarters.

        0 for a polynomial whose last quarter vanishes; >= 1 means no decay.
        """
        a = np.abs(self.to_numpy())
        if len(a) < MIN_DECAY_LENGTH:
            # too short to read a rate from: an explicit polynomial
            return 0.0
        q = max(1, len(a) // 4)
        late = a[-q:].max()
        if late == 0.0:
            return 0.0
        early = a[-2 * q : -q].max() if len(a) >= 2 * q + 1 else a[0]
        if early == 0.0:
            return math.inf
        return float((late / early) ** (1.0 / q))

    def tail_bound(self) -> float:
        """Estimated sum of |c_n| beyond the truncation, from the decay ratio."""
        rho = self.decay_ratio()
        if rho == 0.0:
            return 0.0
        if rho >= 1.0:
            return math.inf
        late = float(np.abs(self.to_numpy())[-max(1, len(self.coeffs) // 4) :].max())
        return late * rho / (1.0 - rho)

    def analytic_radius(self) -> float:
        """Radius R of analyticity inferred from coefficient decay (inf for polynomials)."""
        rho = self.decay_ratio()
        return math.inf if rho == 0.0 else 1.0 / rho

    def cauchy_consistent(self, rtol: float = 1e-12) -> bool:
        if self.sup_hint is None:
            return True
        a = np.abs(self.to_numpy())
        bound = self.sup_hint / self.radius_hint ** np.arange(len(a))
        return bool(np.all(a <= bound * (1 + rtol) + 1e-300))

    # -- serialization -----------------------------------------------------

    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self.to_numpy()]

    @classmethod
    def from_json(cls, data: Sequence) -> "TruncatedSeries":
        return cls(np.array([complex(re, im) for re, im in data], dtype=complex))


# -- constructors --------------------------------------------------------------


def polynomial(coeffs: Sequence, n: int | None = None, exact: bool | None = None) -> TruncatedSeries:
    """Series from explicit coefficients, optionally padded to degree bound n.

    ``exact=None`` picks exact mode when a coefficient is a Fraction or
    Gaussian rational.
    """
    if exact:
        s = TruncatedSeries(tuple(GaussianRational.coerce(c) for c in coeffs))
    elif exact is None:
        s = TruncatedSeries(list(coeffs))
    else:
        s = TruncatedSeries(np.array(coeffs, dtype=complex))
    return s if n is None else s.truncate(n)


def constant(value, n: int, exact: bool = False) -> TruncatedSeries:
    return polynomial([value], n, exact)


def monomial(k: int, n: int, exact: bool = False) -> TruncatedSeries:
    return polynomial([0] * k + [1], n, exact)


def _unit(theta: float, exact: bool):
    if not exact:
        return cmath.exp(1j * theta)
    quarter = theta / (math.pi / 2)
    q = round(quarter)
    if abs(quarter - q) > 1e-12:
        raise ValueError("exact mode supports rotations by multiples of pi/2 only")
    return (GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1), GaussianRational(0, -1))[q % 4]


# -- arithmetic ----------------------------------------------------------------


def _check_mode(*series: TruncatedSeries) -> bool:
    modes = {s.exact for s in series}
    if len(modes) > 1:
        raise TypeError("cannot mix exact and float series; convert with to_exact()")
    return modes.pop()


def _float_mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=complex)
    prod = np.convolve(a[: n + 1], b[: n + 1])[: n + 1]
    out[: len(prod)] = prod
    return out


def mul_mod(f: TruncatedSeries, g: TruncatedSeries, n: int) -> TruncatedSeries:
    """Coefficients of f*g through degree n."""
    if _check_mode(f, g):
        p = mul_low_pair(to_flint(f.coeffs[: n + 1]), to_flint(g.coeffs[: n + 1]), n + 1)
        return TruncatedSeries(from_flint(*p, n + 1))
    return TruncatedSeries(_float_mul(f.coeffs, g.coeffs, n))


def power_mod(f: TruncatedSeries, j: int, n: int) -> TruncatedSeries:
    """f**j through degree n by binary exponentiation."""
    if j < 0:
        raise ValueError("power must be nonnegative")
    if f.exact:
        result = (flint.fmpq_poly([1]), flint.fmpq_poly())
        base = to_flint(f.coeffs[: n + 1])
        while j:
            if j & 1:
                result = mul_low_pair(result, base, n + 1)
            j >>= 1
            if j:
                base = mul_low_pair(base, base, n + 1)
        return TruncatedSeries(from_flint(*result, n + 1))
    result = np.zeros(n + 1, dtype=complex)
    result[0] = 1.0
    base = f.truncate(n).coeffs
    while j:
        if j & 1:
            result = _float_mul(result, base, n)
        j >>= 1
        if j:
            base = _float_mul(base, base, n)
    return TruncatedSeries(result)


def mobius_taylor(z0, theta: float = 0.0, n: int = DEFAULT_N, exact: bool = False) -> TruncatedSeries:
    """Taylor coefficients of e^{i theta} (z0 - z)/(1 - conj(z0) z)."""
    if abs(complex(z0)) >= 1:
        raise ValueError(f"|z0| must be < 1, got {abs(complex(z0))}")
    u = _unit(theta, exact)
    if exact:
        a = GaussianRational.coerce(z0)
        ac = a.conjugate()
        lead = -u * (1 - a.abs2())
        out = [u * a]
        p = GaussianRational(1)
        for _ in range(1, n + 1):
            out.append(lead * p)
            p = p * ac
        return TruncatedSeries(tuple(out), 1.0, 1.0)
    a = complex(z0)
    c = np.empty(n + 1, dtype=complex)
    c[0] = u * a
    if n >= 1:
        c[1:] = -u * (1 - abs(a) ** 2) * np.conj(a) ** np.arange(n)
    return TruncatedSeries(c, 1.0, 1.0)


def blaschke_taylor(zeros: Sequence, theta: float = 0.0, n: int = DEFAULT_N, exact: bool = False) -> TruncatedSeries:
    """Finite Blaschke product e^{i theta} prod (a - z)/(1 - conj(a) z); a = 0 contributes z."""
    for a in zeros:
        if abs(complex(a)) >= 1:
            raise ValueError(f"Blaschke zero {a} is not inside the unit disk")
    u = _unit(theta, exact)
    result = constant(u, n, exact)
    for a in zeros:
        factor = monomial(1, n, exact) if complex(a) == 0 else mobius_taylor(a, 0.0, n, exact)
        result = mul_mod(result, factor, n)
    return TruncatedSeries(result.coeffs, 1.0, 1.0)


def sup_on_disk(g: TruncatedSeries, m: int = 1024) -> float:
    """Upper estimate of sup |g| on the closed disk: boundary max plus tail."""
    if g.sup_hint is not None and g.radius_hint >= 1.0:
        return float(g.sup_hint)
    return float(np.abs(g.boundary_values(m)).max() + g.tail_bound())


def compose_poly(f: TruncatedSeries, g: TruncatedSeries, n: int, tol: float = 1e-9) -> TruncatedSeries:
    """Coefficients of (truncation of f) o g through degree n, by Horner's rule."""
    mode = _check_mode(f, g)
    s = sup_on_disk(g)
    if s > 1 + tol:
        raise ValueError(f"inner function leaves the closed disk: sup |g| ~ {s:.6g}")
    fc = f.truncate(n).coeffs
    if mode:
        gp = to_flint(g.coeffs[: n + 1])
        acc = (flint.fmpq_poly([_fq(fc[n].re)]), flint.fmpq_poly([_fq(fc[n].im)]))
        for k in range(n - 1, -1, -1):
            acc = mul_low_pair(acc, gp, n + 1)
            acc = (acc[0] + _fq(fc[k].re), acc[1] + _fq(fc[k].im))
        return TruncatedSeries(from_flint(*acc, n + 1))
    gc = g.truncate(n).coeffs
    acc = np.zeros(n + 1, dtype=complex)
    acc[0] = fc[n]
    for k in range(n - 1, -1, -1):
        acc = _float_mul(acc, gc, n)
        acc[0] += fc[k]
    return TruncatedSeries(acc)


def _fq(x: Fraction) -> flint.fmpq:
    return flint.fmpq(x.numerator, x.denominator)


def cauchy_tail_bound(sup: float, radius: float, n: int) -> float:
    """sup / R**n: the Cauchy bound on |c_n| for f analytic on the disk of radius R."""
    if radius <= 1:
        raise ValueError("radius must exceed 1")
    if sup < 0:
        raise ValueError("sup must be nonnegative")
    return sup / radius**n
