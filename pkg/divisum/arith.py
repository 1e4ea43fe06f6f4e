"""Exact rationals, precision-tracked reals and the special values everything else uses.

``PrecisionReal`` is a ball: a midpoint computed with mpmath at a fixed working
precision plus a radius bounding the accumulated rounding and propagated error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from divisum.exceptions import DomainError, PoleError

Rational = Fraction

# Extra bits used when a library routine produces a value that is then rounded
# into the caller's precision.
GUARD_BITS = 16


def unit_roundoff(prec: int) -> mpf:
    """Bound on the relative error of one correctly rounded operation."""
    return mpf(2) ** (1 - prec)


def exact_abs(x: mpf) -> mpf:
    """|x| without rounding to the context precision."""
    return mpmath.fneg(x, exact=True) if x < 0 else x


def to_mpf(q: Fraction | int, prec: int) -> mpf:
    with mp.workprec(prec):
        if isinstance(q, int):
            return mpf(q)
        return mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class PrecisionReal:
    """Arbitrary-precision real with a nonnegative error radius."""

    value: mpf
    error_radius: mpf
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < 2:
            raise DomainError(f"precision_bits must be positive, got {self.precision_bits}")
        if not mpmath.isfinite(self.error_radius) or self.error_radius < 0:
            raise DomainError(f"invalid error radius {self.error_radius}")

    # Constructors

    @classmethod
    def exact(cls, value: int | Fraction, prec: int) -> PrecisionReal:
        """Round a rational into a ball that contains it."""
        v = to_mpf(value, prec)
        if isinstance(value, int) and value.bit_length() <= prec:
            return cls(v, mpf(0), prec)
        with mp.workprec(prec):
            return cls(v, exact_abs(v) * unit_roundoff(prec), prec)

    @classmethod
    def from_mpf(cls, value, prec: int, ulps: int = 1) -> PrecisionReal:
        """Wrap a library result known to ``ulps`` units in the last place."""
        with mp.workprec(prec):
            v = +mpf(value)
        return cls(v, exact_abs(v) * ulps * unit_roundoff(prec), prec)

    # Arithmetic

    def _coerce(self, other) -> PrecisionReal:
        if isinstance(other, PrecisionReal):
            return other
        if isinstance(other, (int, Fraction)):
            return PrecisionReal.exact(other, self.precision_bits)
        if isinstance(other, mpf):
            return PrecisionReal(other, mpf(0), self.precision_bits)
        if isinstance(other, float):
            with mp.workprec(53):
                return PrecisionReal(mpf(other), mpf(0), self.precision_bits)
        return NotImplemented

    def _wrap(self, value: mpf, propagated: mpf, prec: int) -> PrecisionReal:
        with mp.workprec(prec):
            radius = propagated + exact_abs(value) * unit_roundoff(prec)
        return PrecisionReal(value, radius, prec)

    def __add__(self, other) -> PrecisionReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.precision_bits, other.precision_bits)
        with mp.workprec(prec):
            v = self.value + other.value
            r = self.error_radius + other.error_radius
        return self._wrap(v, r, prec)

    __radd__ = __add__

    def __neg__(self) -> PrecisionReal:
        return PrecisionReal(
            mpmath.fneg(self.value, exact=True), self.error_radius, self.precision_bits
        )

    def __sub__(self, other) -> PrecisionReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> PrecisionReal:
        return (-self) + other

    def __mul__(self, other) -> PrecisionReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.precision_bits, other.precision_bits)
        with mp.workprec(prec):
            v = self.value * other.value
            r = (
                abs(self.value) * other.error_radius
                + abs(other.value) * self.error_radius
                + self.error_radius * other.error_radius
            )
        return self._wrap(v, r, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> PrecisionReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.precision_bits, other.precision_bits)
        with mp.workprec(prec):
            lower = abs(other.value) - other.error_radius
            if lower <= 0:
                raise PoleError("division by a ball that contains zero")
            v = self.value / other.value
            r = (
                abs(self.value) * other.error_radius + abs(other.value) * self.error_radius
            ) / (abs(other.value) * lower)
        return self._wrap(v, r, prec)

    def __rtruediv__(self, other) -> PrecisionReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> PrecisionReal:
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = PrecisionReal.exact(1, self.precision_bits)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __abs__(self) -> PrecisionReal:
        return PrecisionReal(
            exact_abs(self.value), self.error_radius, self.precision_bits
        )

    # Elementary functions

    def exp(self) -> PrecisionReal:
        with mp.workprec(self.precision_bits):
            v = mp.exp(self.value)
            r = v * (mp.exp(self.error_radius) - 1)
        return self._wrap(v, r, self.precision_bits)

    def log(self) -> PrecisionReal:
        with mp.workprec(self.precision_bits):
            lower = self.value - self.error_radius
            if lower <= 0:
                raise DomainError("log of a ball that reaches zero")
            v = mp.log(self.value)
            r = self.error_radius / lower
        return self._wrap(v, r, self.precision_bits)

    def sqrt(self) -> PrecisionReal:
        with mp.workprec(self.precision_bits):
            lower = self.value - self.error_radius
            if lower <= 0:
                raise DomainError("sqrt of a ball that reaches zero")
            v = mp.sqrt(self.value)
            r = self.error_radius / (2 * mp.sqrt(lower))
        return self._wrap(v, r, self.precision_bits)

    # Inspection

    @property
    def lower(self) -> mpf:
        return mpmath.fsub(self.value, self.error_radius, exact=True)

    @property
    def upper(self) -> mpf:
        return mpmath.fadd(self.value, self.error_radius, exact=True)

    def contains(self, x: int | Fraction | mpf) -> bool:
        """True when the exact value ``x`` lies inside the ball."""
        with mp.workprec(self.precision_bits + 64):
            xv = to_mpf(x, self.precision_bits + 64) if isinstance(x, (int, Fraction)) else mpf(x)
            return abs(xv - self.value) <= self.error_radius

    def overlaps(self, other: PrecisionReal, slack: float = 0.0) -> bool:
        with mp.workprec(min(self.precision_bits, other.precision_bits)):
            gap = abs(self.value - other.value)
            return gap <= (self.error_radius + other.error_radius) * (1 + slack)

    def digits(self) -> int:
        return max(1, int(self.precision_bits * math.log10(2)))

    def to_decimal_string(self, digits: int | None = None) -> str:
        with mp.workprec(self.precision_bits):
            return mp.nstr(self.value, digits or self.digits(), min_fixed=-5, max_fixed=6)

    def radius_string(self) -> str:
        return mp.nstr(self.error_radius, 3)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"PrecisionReal({self.to_decimal_string(20)} ± {self.radius_string()})"


@dataclass(frozen=True)
class Constants:
    """π, Euler's γ and log 2 at one working precision."""

    pi: PrecisionReal
    euler_gamma: PrecisionReal
    log2: PrecisionReal


@lru_cache(maxsize=None)
def constants(prec: int) -> Constants:
    with mp.workprec(prec + GUARD_BITS):
        pi, gamma, log2 = +mp.pi, +mp.euler, +mp.ln2
    return Constants(
        pi=PrecisionReal.from_mpf(pi, prec),
        euler_gamma=PrecisionReal.from_mpf(gamma, prec),
        log2=PrecisionReal.from_mpf(log2, prec),
    )


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number B_m (B_1 = -1/2)."""
    if m < 0:
        raise DomainError(f"Bernoulli index must be nonnegative, got {m}")
    return Fraction(*mpmath.bernfrac(m))


def zeta_even(m: int) -> Fraction:
    """Rational r with ζ(m) = r·π^m for even m ≥ 2."""
    if m < 2 or m % 2:
        raise DomainError(f"zeta_even needs an even integer >= 2, got {m}")
    half = m // 2
    return (-1) ** (half + 1) * bernoulli(m) * 2**m / (2 * math.factorial(m))


def zeta_odd(m: int, prec: int) -> PrecisionReal:
    if m == 1:
        raise PoleError("ζ has a pole at s = 1")
    if m < 3 or m % 2 == 0:
        raise DomainError(f"zeta_odd needs an odd integer >= 3, got {m}")
    with mp.workprec(prec + GUARD_BITS):
        value = mp.zeta(m)
    return PrecisionReal.from_mpf(value, prec)


def zeta_value(m: int, prec: int) -> PrecisionReal:
    """ζ(m) for any integer m ≥ 2."""
    if m % 2 == 0:
        return PrecisionReal.exact(zeta_even(m), prec) * constants(prec).pi ** m
    return zeta_odd(m, prec)


def zeta_prime_neg_even(m: int, prec: int) -> PrecisionReal:
    """ζ'(−m) = (−1)^{m/2} m! ζ(m+1) / (2 (2π)^m)."""
    if m < 2 or m % 2:
        raise DomainError(f"zeta_prime_neg_even needs an even integer >= 2, got {m}")
    scale = Fraction((-1) ** (m // 2) * math.factorial(m), 2 * 2**m)
    return zeta_odd(m + 1, prec) * scale / constants(prec).pi ** m


def harmonic(d: int) -> Fraction:
    if d < 0:
        raise DomainError(f"harmonic number index must be nonnegative, got {d}")
    return sum((Fraction(1, j) for j in range(1, d + 1)), Fraction(0))


def digamma_half(k: int, prec: int) -> PrecisionReal:
    """ψ(k + 1/2)."""
    if k < 0:
        raise DomainError(f"digamma_half needs k >= 0, got {k}")
    with mp.workprec(prec + GUARD_BITS):
        value = mp.digamma(mpf(k) + mpf(1) / 2)
    return PrecisionReal.from_mpf(value, prec)


def incomplete_gamma_upper(m: int, x, prec: int) -> PrecisionReal:
    """Γ(m, x) for integer m ≥ 1 and x ≥ 0."""
    if m < 1:
        raise DomainError(f"incomplete_gamma_upper needs m >= 1, got {m}")
    ball = x if isinstance(x, PrecisionReal) else None
    if ball is not None:
        xv = ball.value
    elif isinstance(x, (int, Fraction)):
        xv = to_mpf(x, prec)
    else:
        with mp.workprec(prec):
            xv = +mpf(x)
    if xv < 0:
        raise DomainError(f"incomplete_gamma_upper needs x >= 0, got {xv}")
    with mp.workprec(prec + GUARD_BITS):
        value = mp.gammainc(m, a=xv)
        # |dΓ(m,x)/dx| = x^{m-1} e^{-x}
        slope = xv ** (m - 1) * mp.exp(-xv) if ball is not None else mpf(0)
    result = PrecisionReal.from_mpf(value, prec, ulps=2)
    if ball is not None:
        result = PrecisionReal(
            result.value, result.error_radius + slope * ball.error_radius, prec
        )
    return result
