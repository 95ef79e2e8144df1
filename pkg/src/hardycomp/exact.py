"""Exact Gaussian-rational scalars and the bridge to FLINT rational polynomials.

A ``GaussianRational`` is ``re + i*im`` with ``fractions.Fraction`` parts.  It is
deliberately small: enough arithmetic for 2x2 Moebius matrices and for the
coefficient bookkeeping of exact truncated series.  Heavy polynomial products
go through ``flint.fmpq_poly`` on the real and imaginary parts separately.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import flint


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        """Exact conversion; floats are taken at their binary value."""
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (Rational, int)):
            return cls(Fraction(x), 0)
        if isinstance(x, float):
            return cls(Fraction(x), 0)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, flint.fmpq):
            return cls(Fraction(int(x.p), int(x.q)), 0)
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.abs2()
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (1 / self) ** (-k)
        out, base = GaussianRational(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussianRational(0, 1)


def is_exact_scalar(x) -> bool:
    return isinstance(x, (GaussianRational, Rational)) and not isinstance(x, bool)


def _to_fmpq(x: Fraction) -> flint.fmpq:
    return flint.fmpq(x.numerator, x.denominator)


def _from_fmpq(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def to_flint(coeffs) -> tuple[flint.fmpq_poly, flint.fmpq_poly]:
    """Split a sequence of Gaussian rationals into (real, imaginary) polynomials."""
    re = flint.fmpq_poly([_to_fmpq(c.re) for c in coeffs])
    im = flint.fmpq_poly([_to_fmpq(c.im) for c in coeffs])
    return re, im


def from_flint(re: flint.fmpq_poly, im: flint.fmpq_poly, length: int) -> tuple[GaussianRational, ...]:
    """Inverse of ``to_flint``, padded or cut to ``length`` coefficients."""
    rc = re.coeffs()
    ic = im.coeffs()
    out = []
    for k in range(length):
        a = _from_fmpq(rc[k]) if k < len(rc) else Fraction(0)
        b = _from_fmpq(ic[k]) if k < len(ic) else Fraction(0)
        out.append(GaussianRational(a, b))
    return tuple(out)


def mul_low_pair(a, b, n: int):
    """Product of two complex polynomials given as (re, im) pairs, mod z**n."""
    ar, ai = a
    br, bi = b
    if ai.is_zero() and bi.is_zero():
        return ar.mul_low(br, n), flint.fmpq_poly()
    rr = ar.mul_low(br, n) - ai.mul_low(bi, n)
    ii = ar.mul_low(bi, n) + ai.mul_low(br, n)
    return rr, ii
