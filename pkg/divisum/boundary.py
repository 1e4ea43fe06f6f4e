"""Z-terms, real-analytic Eisenstein Fourier data and the boundary terms of the projection.

The holomorphic projection of E*_{2k1}(z, m1+1/2)·E*_{2k2}(z, m2+1/2)·y^{-k1-k2}
has n-th coefficient

    a_n = Σ_{n1+n2=n, n1·n2≠0} a_{n1,n2} + a_{n,0} + a_{0,n},

with a_{n1,n2} = prefactor·σ_{r1}(n1)·σ_{r2}(n2)·Q((n2-n1)/n). Dividing the
boundary terms by the prefactor gives the Z-part of the identity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import sympy
from mpmath import mp, mpf

from divisum.arith import (
    GUARD_BITS,
    PrecisionReal,
    constants,
    digamma_half,
    harmonic,
    zeta_prime_neg_even,
    zeta_value,
)
from divisum.exceptions import DomainError, PoleError
from divisum.jacobi import LogLinearValue, q_eval_exact
from divisum.sums import ConvolutionParams, sigma
from divisum.whittaker import WhittakerParams, whittaker_ext

logger = logging.getLogger(__name__)


# Z-terms


def _check_z_params(d: int, alpha: int, beta: int, n: int) -> None:
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if alpha < 0 or beta < 0 or alpha % 2 or beta % 2:
        raise DomainError(f"alpha, beta must be even and >= 0, got ({alpha}, {beta})")
    if n == 0:
        raise DomainError("n must be nonzero")


def z_term(d: int, alpha: int, beta: int, n: int, prec: int) -> LogLinearValue | PrecisionReal:
    """Z_d^{(α,β)}(n).

    β ≠ 0: (β-1)!(α+d)!/(2(α+β+d)!)·ζ(β)·n^β + C(d+β, d)·ζ'(-β)/2.
    β = 0: (H_{d+α} + H_d - log(4π²|n|))/4, exact.
    """
    _check_z_params(d, alpha, beta, n)
    if beta == 0:
        return LogLinearValue(
            (harmonic(d + alpha) + harmonic(d)) / 4, Fraction(-1, 4), Fraction(4 * abs(n)), 2
        )
    head = Fraction(
        math.factorial(beta - 1) * math.factorial(alpha + d),
        2 * math.factorial(alpha + beta + d),
    )
    return (
        zeta_value(beta, prec) * (head * n**beta)
        + zeta_prime_neg_even(beta, prec) * Fraction(math.comb(d + beta, d), 2)
    )


def z_term_real(d: int, alpha: int, beta: int, n: int, prec: int) -> PrecisionReal:
    value = z_term(d, alpha, beta, n, prec)
    return value.to_real(prec) if isinstance(value, LogLinearValue) else value


N_SYMBOL = sympy.Symbol("n", positive=True)


def zeta_prime_neg_even_symbolic(beta: int) -> sympy.Expr:
    """ζ'(-β) = (-1)^{β/2} β! ζ(β+1)/(2(2π)^β) as a sympy expression."""
    return (
        (-1) ** (beta // 2)
        * sympy.factorial(beta)
        * sympy.zeta(beta + 1)
        / (2 * (2 * sympy.pi) ** beta)
    )


def z_term_expression(d: int, alpha: int, beta: int, n=N_SYMBOL) -> sympy.Expr:
    """Symbolic Z_d^{(α,β)}(n) with ζ'(-β) in closed form."""
    _check_z_params(d, alpha, beta, 1)
    if beta == 0:
        H = sympy.harmonic(d + alpha) + sympy.harmonic(d)
        return (H - sympy.log(4 * sympy.pi**2 * n)) / 4
    head = sympy.Rational(
        math.factorial(beta - 1) * math.factorial(alpha + d),
        2 * math.factorial(alpha + beta + d),
    )
    tail = sympy.Rational(math.comb(d + beta, d), 2)
    return head * sympy.zeta(beta) * n**beta + tail * zeta_prime_neg_even_symbolic(beta)


def z_term_string(d: int, alpha: int, beta: int, n: int) -> str:
    """Human-readable Z-term with ζ(β), ζ'(-β) and log kept unevaluated."""
    _check_z_params(d, alpha, beta, n)
    if beta == 0:
        H = (harmonic(d + alpha) + harmonic(d)) / 4
        return f"{H} - (1/4)·log(4π²·{abs(n)})"
    head = Fraction(
        math.factorial(beta - 1) * math.factorial(alpha + d),
        2 * math.factorial(alpha + beta + d),
    ) * n**beta
    tail = Fraction(math.comb(d + beta, d), 2)
    return f"({head})·ζ({beta}) + ({tail})·ζ'(-{beta})"


def z_part(p: ConvolutionParams, prec: int) -> PrecisionReal:
    """(-1)^d Z_d^{(r1,r2)}(n) σ_{r1}(n) - Z_d^{(r2,r1)}(n) σ_{r2}(n)."""
    first = z_term_real(p.d, p.r1, p.r2, p.n, prec) * sigma(p.r1, p.n)
    second = z_term_real(p.d, p.r2, p.r1, p.n, prec) * sigma(p.r2, p.n)
    return first * (-1) ** p.d - second


def sigma_symbol(r: int) -> sympy.Symbol:
    return sympy.Symbol(f"sigma_{r}", positive=True)


def z_part_expression(p: ConvolutionParams) -> sympy.Expr:
    """z_part with n and σ_r(n) left symbolic."""
    first = z_term_expression(p.d, p.r1, p.r2) * sigma_symbol(p.r1)
    second = z_term_expression(p.d, p.r2, p.r1) * sigma_symbol(p.r2)
    return (-1) ** p.d * first - second


# Eisenstein series


@dataclass(frozen=True)
class EisensteinParams:
    """E*_{2kk}(z, s)."""

    kk: int
    s: int | Fraction | float

    def __post_init__(self):
        if self.kk < 0:
            raise DomainError(f"kk must be nonnegative, got {self.kk}")
        if self.s <= 0:
            raise DomainError(f"s must be positive, got {self.s}")

    @property
    def s_mpf(self) -> mpf:
        s = self.s
        return mpf(s.numerator) / s.denominator if isinstance(s, Fraction) else mpf(s)

    def theta(self, s: mpf) -> mpf:
        """θ_k(s) = π^{-s} Γ(s+k) ζ(2s) at the working precision."""
        arg = s + self.kk
        if arg <= 0 and arg == int(arg):
            raise PoleError(f"Γ(s+k) has a pole at s = {s}, k = {self.kk}")
        if 2 * s == 1:
            raise PoleError("ζ(2s) has a pole at s = 1/2")
        return mp.pi ** (-s) * mp.gamma(arg) * mp.zeta(2 * s)


def constant_term(e: EisensteinParams, y, prec: int) -> PrecisionReal:
    """c_{k,s}(y): θ_k(s)y^s + θ_k(1-s)y^{1-s} for s > 1/2, the digamma form at s = 1/2."""
    if y <= 0:
        raise DomainError(f"y must be positive, got {y}")
    if e.s < Fraction(1, 2):
        raise DomainError(f"constant_term needs s >= 1/2, got {e.s}")
    if e.s == Fraction(1, 2):
        c = constants(prec)
        with mp.workprec(prec + GUARD_BITS):
            gamma_half = PrecisionReal.from_mpf(mp.gamma(mpf(e.kk) + mpf(1) / 2), prec)
            y_ball = PrecisionReal.from_mpf(mpf(y), prec)
        bracket = digamma_half(e.kk, prec) + c.euler_gamma * 2 + (y_ball / c.pi).log()
        return gamma_half / c.pi.sqrt() * bracket * y_ball.sqrt()
    with mp.workprec(prec + GUARD_BITS):
        s, yv = e.s_mpf, mpf(y)
        value = e.theta(s) * yv**s + e.theta(1 - s) * yv ** (1 - s)
    return PrecisionReal.from_mpf(value, prec, ulps=8)


def _sigma_real(exponent: mpf, n: int) -> mpf:
    return mp.fsum(mpf(t) ** exponent for t in sympy.divisors(abs(n)))


def eis_fourier_coeff(e: EisensteinParams, n: int, y, prec: int) -> PrecisionReal:
    """(-1)^k σ_{2s-1}(n)/|n|^s · W_{k,s-1/2}(4πny), the n-th coefficient at height y."""
    if n == 0:
        raise DomainError("the Fourier coefficient needs n != 0")
    if y <= 0:
        raise DomainError(f"y must be positive, got {y}")
    with mp.workprec(prec + GUARD_BITS):
        s = e.s_mpf
        scale = (-1) ** e.kk * _sigma_real(2 * s - 1, n) / mpf(abs(n)) ** s
        arg = 4 * mp.pi * n * mpf(y)
    mu = e.s - Fraction(1, 2) if isinstance(e.s, (int, Fraction)) else e.s - 0.5
    w = whittaker_ext(WhittakerParams(e.kk, mu), arg, prec)
    return w * PrecisionReal.from_mpf(scale, prec, ulps=4)


# Boundary terms


@dataclass(frozen=True)
class Split:
    """Weights 2k1, 2k2 and spectral shifts m_i = r_i/2 of the two Eisenstein factors."""

    k1: int
    k2: int
    m1: int
    m2: int

    def swapped(self) -> Split:
        return Split(self.k2, self.k1, self.m2, self.m1)


@dataclass(frozen=True)
class BoundaryTerms:
    an0: PrecisionReal
    a0n: PrecisionReal
    params: ConvolutionParams
    split: Split


def admissible_splits(p: ConvolutionParams) -> list[Split]:
    """All (k1, k2) with 2k1 + 2k2 = k and k_i >= m_i."""
    m1, m2 = p.r1 // 2, p.r2 // 2
    half = p.k // 2
    return [Split(k1, half - k1, m1, m2) for k1 in range(m1, half - m2 + 1)]


def _check_split(p: ConvolutionParams, split: Split) -> None:
    if p.n <= 0:
        raise DomainError(f"boundary terms are defined for n > 0, got {p.n}")
    if (split.m1, split.m2) != (p.r1 // 2, p.r2 // 2):
        raise DomainError(f"split {split} does not match r = ({p.r1}, {p.r2})")
    if 2 * (split.k1 + split.k2) != p.k or split.k1 < split.m1 or split.k2 < split.m2:
        raise DomainError(f"split {split} is not admissible for weight {p.k}")


def anm_prefactor(p: ConvolutionParams, split: Split, prec: int) -> PrecisionReal:
    """2(-1)^{k2+m1}(4π)^{k/2} n^d d!(d+r1+r2)!/(π(2d+r1+r2)!)."""
    _check_split(p, split)
    d, r1, r2 = p.d, p.r1, p.r2
    rational = Fraction(
        2 * (-1) ** (split.k2 + split.m1) * 4 ** (p.k // 2) * p.n**d
        * math.factorial(d) * math.factorial(d + r1 + r2),
        math.factorial(2 * d + r1 + r2),
    )
    return constants(prec).pi ** (p.k // 2 - 1) * rational


def boundary_an0(p: ConvolutionParams, split: Split, prec: int) -> PrecisionReal:
    """a_{n,0}, the product of the first Eisenstein coefficient with the second constant term.

    The sign in front is (-1)^{k1}: the n-th coefficient of E*_{2k1} carries it.
    """
    _check_split(p, split)
    d, r1, r2, n, k = p.d, p.r1, p.r2, p.n, p.k
    pi_power = constants(prec).pi ** (k // 2 - 1)
    sign = (-1) ** split.k1
    if r2 == 0:
        rational = Fraction(
            sign * 2 ** (k - 1) * n**d * math.factorial(d) * math.factorial(d + r1)
            * sigma(r1, n),
            math.factorial(k - 2),
        )
        log_term = LogLinearValue(harmonic(d) + harmonic(d + r1), -1, 4 * n, 2)
        return pi_power * log_term.to_real(prec) * rational
    rational = Fraction(
        sign * (-1) ** split.m2 * 2**k * n**d * sigma(r1, n), math.factorial(k - 2)
    )
    bracket = zeta_value(r2, prec) * (
        n**r2 * math.factorial(r2 - 1) * math.factorial(d) * math.factorial(d + r1)
    ) + zeta_prime_neg_even(r2, prec) * Fraction(
        math.factorial(d + r2) * math.factorial(d + r1 + r2), math.factorial(r2)
    )
    return pi_power * bracket * rational


def boundary_a0n(p: ConvolutionParams, split: Split, prec: int) -> PrecisionReal:
    """a_{0,n}: a_{n,0} with the two Eisenstein factors exchanged."""
    _check_split(p, split)
    return boundary_an0(p.swapped(), split.swapped(), prec)


def boundary_terms(p: ConvolutionParams, split: Split, prec: int) -> BoundaryTerms:
    return BoundaryTerms(
        boundary_an0(p, split, prec), boundary_a0n(p, split, prec), p, split
    )


def boundary_an0_near_zero(p: ConvolutionParams, split: Split, r2, prec: int) -> PrecisionReal:
    """a_{n,0} from the generic formula with a real (non-integer) r2.

    Used to check the r2 → 0 limit: the poles of ζ(r2)Γ(r2) and ζ(-r2)Γ(-r2)
    cancel, leaving the harmonic-number form.
    """
    _check_split(p, split)
    d, r1, n = p.d, p.r1, p.n
    with mp.workprec(2 * prec + GUARD_BITS):
        r = mpf(r2)
        k = 2 * d + r1 + r + 2
        head = (
            (-1) ** split.k1
            * 2**k
            * mp.pi ** (k / 2 - 1)
            * mp.cos(mp.pi * r / 2)
            * mp.rgamma(k - 1)
            * mpf(n) ** d
            * sigma(r1, n)
        )
        bracket = mpf(n) ** r * mp.zeta(r) * mp.gamma(r) * mp.factorial(d) * mp.factorial(
            d + r1
        ) + mp.zeta(-r) * mp.gamma(-r) * mp.gamma(d + r + 1) * mp.gamma(r1 + r + d + 1)
        value = head * bracket
    return PrecisionReal.from_mpf(value, prec, ulps=16)


def normalized_boundary(p: ConvolutionParams, split: Split, prec: int) -> PrecisionReal:
    """-(a_{n,0} + a_{0,n})/prefactor, which equals z_part(p)."""
    terms = boundary_terms(p, split, prec)
    return -(terms.an0 + terms.a0n) / anm_prefactor(p, split, prec)


def pair_coefficient(p: ConvolutionParams, split: Split, n1: int, prec: int) -> PrecisionReal:
    """a_{n1,n2} = prefactor·σ_{r1}(n1)·σ_{r2}(n2)·Q((n2-n1)/n) with n2 = n - n1."""
    n2 = p.n - n1
    if n1 == 0 or n2 == 0:
        raise DomainError(f"pair coefficients need n1·n2 != 0, got ({n1}, {n2})")
    q_value = q_eval_exact(p.q, n1, n2).to_real(prec)
    divisors = sigma(p.r1, n1) * sigma(p.r2, n2)
    return anm_prefactor(p, split, prec) * q_value * divisors
