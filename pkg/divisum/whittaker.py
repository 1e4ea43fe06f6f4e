"""Whittaker W functions and quadrature checks of the integrals built from them.

The Eisenstein Fourier coefficients use the extended W. The rest checks the
Mellin transforms and the convolution integral whose closed forms produce Q
and the boundary terms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from divisum.arith import GUARD_BITS, PrecisionReal
from divisum.exceptions import DomainError, PoleError, UnsupportedRegimeError
from divisum.jacobi import jacobi_second_kind, q_eval_real

logger = logging.getLogger(__name__)

Real = int | Fraction | float


def _mpf(x: Real) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


@dataclass(frozen=True)
class WhittakerParams:
    kappa: Real
    mu: Real

    def __post_init__(self):
        if self.mu < 0:
            raise DomainError(f"mu must be nonnegative, got {self.mu}")

    def negated(self) -> WhittakerParams:
        return WhittakerParams(-self.kappa, self.mu)


@dataclass(frozen=True)
class WConvolutionParams:
    k1: int
    k2: int
    m1: int
    m2: int
    a: Fraction
    b: Fraction

    def __post_init__(self):
        for name in ("k1", "k2", "m1", "m2"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.m1 > self.k1 or self.m2 > self.k2:
            raise DomainError(f"need m_i <= k_i, got k=({self.k1}, {self.k2}) m=({self.m1}, {self.m2})")
        if self.m1 + self.m2 >= self.k1 + self.k2:
            raise DomainError("m1 + m2 must be below k1 + k2")
        a, b = Fraction(self.a), Fraction(self.b)
        if a + b != 1:
            raise DomainError(f"a + b must equal 1, got {a + b}")
        if a * b == 0:
            raise DomainError("a and b must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def ell(self) -> int:
        return self.k1 + self.k2 - self.m1 - self.m2 - 1

    @property
    def qq(self) -> int:
        return self.k1 + self.k2 + self.m1 + self.m2 - 1


@dataclass(frozen=True)
class CheckResult:
    """A quadrature value next to the closed form it should equal."""

    quadrature: PrecisionReal
    closed_form: PrecisionReal

    @property
    def residual(self) -> mpf:
        return abs(self.quadrature.value - self.closed_form.value)

    @property
    def consistent(self) -> bool:
        return self.quadrature.overlaps(self.closed_form)


def _two_precisions(fn, prec: int) -> PrecisionReal:
    """Evaluate fn at prec + guard bits and at prec + 32; the gap is the error."""
    try:
        with mp.workprec(prec + GUARD_BITS):
            value = mp.re(fn())
        with mp.workprec(prec + 32 + GUARD_BITS):
            reference = mp.re(fn())
    except mp.NoConvergence as exc:
        raise UnsupportedRegimeError(f"Whittaker evaluation did not converge: {exc}") from exc
    with mp.workprec(prec + 32 + GUARD_BITS):
        gap = abs(value - reference)
    result = PrecisionReal.from_mpf(value, prec)
    return PrecisionReal(result.value, result.error_radius + gap, prec)


def whittaker_w(p: WhittakerParams, y: Real, prec: int) -> PrecisionReal:
    """W_{κ,μ}(y) for y > 0."""
    if y <= 0:
        raise DomainError(f"whittaker_w needs y > 0, got {y}")
    return _two_precisions(lambda: mp.whitw(_mpf(p.kappa), _mpf(p.mu), _mpf(y)), prec)


def _extension_ratio(p: WhittakerParams) -> mpf:
    """Γ(1/2+μ+κ)/Γ(1/2+μ-κ), zero when only the denominator has a pole."""
    top = mpf(1) / 2 + _mpf(p.mu) + _mpf(p.kappa)
    if top <= 0 and top == int(top):
        raise PoleError(f"Γ(1/2+μ+κ) has a pole at κ={p.kappa}, μ={p.mu}")
    return mp.gamma(top) * mp.rgamma(mpf(1) / 2 + _mpf(p.mu) - _mpf(p.kappa))


def whittaker_ext(p: WhittakerParams, y: Real, prec: int) -> PrecisionReal:
    """W extended to y < 0 by W(y) = Γ(1/2+μ+κ)/Γ(1/2+μ-κ)·W_{-κ,μ}(|y|)."""
    if y == 0:
        raise DomainError("whittaker_ext is undefined at y = 0")
    if y > 0:
        return whittaker_w(p, y, prec)
    with mp.workprec(prec + GUARD_BITS):
        ratio = _extension_ratio(p)
    if ratio == 0:
        return PrecisionReal.exact(0, prec)
    return whittaker_w(p.negated(), -y, prec) * PrecisionReal.from_mpf(ratio, prec, ulps=4)


def u_integral(a: Real, b: Real, y: Real, prec: int) -> PrecisionReal:
    """U(a, b, y) = (1/Γ(a)) ∫₀^∞ e^{-yt} t^{a-1} (1+t)^{b-a-1} dt for a > 0."""
    if a <= 0:
        raise DomainError(f"the U integral needs a > 0, got {a}")
    if y <= 0:
        raise DomainError(f"the U integral needs y > 0, got {y}")
    with mp.workprec(prec + GUARD_BITS):
        av, bv, yv = _mpf(a), _mpf(b), _mpf(y)
        value, err = mp.quad(
            lambda t: mp.exp(-yv * t) * t ** (av - 1) * (1 + t) ** (bv - av - 1),
            [0, 1, mp.inf],
            error=True,
        )
        value *= mp.rgamma(av)
        err *= abs(mp.rgamma(av))
    result = PrecisionReal.from_mpf(value, prec, ulps=4)
    return PrecisionReal(result.value, result.error_radius + err, prec)


def whittaker_by_integral(p: WhittakerParams, y: Real, prec: int) -> PrecisionReal:
    """W_{κ,μ}(y) = e^{-y/2} y^{μ+1/2} U(μ-κ+1/2, 1+2μ, y).

    For μ-κ+1/2 ≤ 0 the U values are started at a first argument in (0, 1]
    and stepped down with U(a-1) = (2a-b+y)U(a) - a(a-b+1)U(a+1).
    """
    a = Fraction(p.mu) - Fraction(p.kappa) + Fraction(1, 2)
    b = 1 + 2 * Fraction(p.mu)
    steps = 0 if a > 0 else math.floor(-a) + 1
    start = a + steps
    upper = u_integral(start, b, y, prec)
    if steps:
        above = u_integral(start + 1, b, y, prec)
        current = start
        for _ in range(steps):
            lower = upper * (2 * current - b + Fraction(y)) - above * (
                current * (current - b + 1)
            )
            upper, above = lower, upper
            current -= 1
    with mp.workprec(prec + GUARD_BITS):
        yv = _mpf(y)
        scale = mp.exp(-yv / 2) * yv ** (_mpf(p.mu) + mpf(1) / 2)
    return upper * PrecisionReal.from_mpf(scale, prec, ulps=2)


def kappa_recurrence_residual(p: WhittakerParams, y: Real, prec: int) -> PrecisionReal:
    """W_{κ+1} + (2κ-y)W_κ + (κ-μ-1/2)(κ+μ-1/2)W_{κ-1}, which vanishes."""
    kappa, mu = Fraction(p.kappa), Fraction(p.mu)
    up = whittaker_w(WhittakerParams(kappa + 1, mu), y, prec)
    mid = whittaker_w(p, y, prec)
    down = whittaker_w(WhittakerParams(kappa - 1, mu), y, prec)
    half = Fraction(1, 2)
    return up + mid * (2 * kappa - Fraction(y)) + down * (
        (kappa - mu - half) * (kappa + mu - half)
    )


def _quadrature(integrand, prec: int) -> PrecisionReal:
    with mp.workprec(prec + GUARD_BITS):
        value, err = mp.quad(integrand, [0, 1, mp.inf], error=True)
        value = mp.re(value)
    result = PrecisionReal.from_mpf(value, prec, ulps=4)
    return PrecisionReal(result.value, result.error_radius + err, prec)


def mellin_w_check1(kappa: Real, mu: Real, s: Real, prec: int) -> CheckResult:
    """∫₀^∞ W_{κ,μ}(t) e^{-t/2} t^{s-1} dt = Γ(s-μ+1/2)Γ(s+μ+1/2)/Γ(s-κ+1)."""
    if kappa < 0 or mu < 0:
        raise DomainError(f"need κ, μ >= 0, got ({kappa}, {mu})")
    if s <= mu - Fraction(1, 2):
        raise DomainError(f"need s > μ - 1/2, got s={s}, μ={mu}")
    with mp.workprec(prec + GUARD_BITS):
        k, m, sv = _mpf(kappa), _mpf(mu), _mpf(s)
    quadrature = _quadrature(
        lambda t: mp.whitw(k, m, t) * mp.exp(-t / 2) * t ** (sv - 1), prec
    )
    with mp.workprec(prec + GUARD_BITS):
        half = mpf(1) / 2
        closed = mp.gamma(sv - m + half) * mp.gamma(sv + m + half) * mp.rgamma(sv - k + 1)
    return CheckResult(quadrature, PrecisionReal.from_mpf(closed, prec, ulps=4))


def mellin_w_check2(kappa: Real, mu: Real, s: Real, prec: int) -> CheckResult:
    """∫₀^∞ W_{κ,μ}(-t) e^{t/2} t^{s-1} dt = cos(π(κ-μ))/π·Γ(s-μ+1/2)Γ(s+μ+1/2)Γ(κ-s)."""
    if kappa < 0 or mu < 0:
        raise DomainError(f"need κ, μ >= 0, got ({kappa}, {mu})")
    if s == kappa:
        raise PoleError(f"Γ(κ - s) has a pole at s = κ = {kappa}")
    if not kappa > s > mu - Fraction(1, 2):
        raise DomainError(f"need κ > s > μ - 1/2, got κ={kappa}, s={s}, μ={mu}")
    with mp.workprec(prec + GUARD_BITS):
        k, m, sv = _mpf(kappa), _mpf(mu), _mpf(s)
        half = mpf(1) / 2
        ratio = _extension_ratio(WhittakerParams(kappa, mu))

    # e^{t/2}·W_{-κ,μ}(t) = t^{μ+1/2}·U(μ+κ+1/2, 1+2μ, t)
    def integrand(t):
        return ratio * t ** (m + half) * mp.hyperu(m + k + half, 1 + 2 * m, t) * t ** (sv - 1)

    quadrature = _quadrature(integrand, prec)
    with mp.workprec(prec + GUARD_BITS):
        closed = (
            mp.cos(mp.pi * (k - m))
            / mp.pi
            * mp.gamma(sv - m + half)
            * mp.gamma(sv + m + half)
            * mp.gamma(k - sv)
        )
    return CheckResult(quadrature, PrecisionReal.from_mpf(closed, prec, ulps=4))


def _ext_mpf(kappa: int, mu: int, y: mpf) -> mpf:
    if y > 0:
        return mp.whitw(kappa, mu, y)
    return _extension_ratio(WhittakerParams(kappa, mu)) * mp.whitw(-kappa, mu, -y)


def w_convolution_check(p: WConvolutionParams, prec: int) -> CheckResult:
    """∫₀^∞ W_{k1,m1}(ay) W_{k2,m2}(by) e^{-y/2} y^{k1+k2-2} dy
    = 2(-1)^{k1-m1} q! ℓ!/π · |a|^{m1+1/2} |b|^{m2+1/2} · Q_ℓ^{(2m1,2m2)}(b-a).
    """
    with mp.workprec(prec + GUARD_BITS):
        a, b = _mpf(p.a), _mpf(p.b)
    power = p.k1 + p.k2 - 2
    quadrature = _quadrature(
        lambda y: _ext_mpf(p.k1, p.m1, a * y)
        * _ext_mpf(p.k2, p.m2, b * y)
        * mp.exp(-y / 2)
        * y**power,
        prec,
    )
    Q = jacobi_second_kind(p.ell, 2 * p.m1, 2 * p.m2)
    q_value = q_eval_real(Q, p.b - p.a, prec)
    with mp.workprec(prec + GUARD_BITS):
        half = mpf(1) / 2
        scale = (
            2
            * (-1) ** (p.k1 - p.m1)
            * math.factorial(p.qq)
            * math.factorial(p.ell)
            / mp.pi
            * abs(a) ** (p.m1 + half)
            * abs(b) ** (p.m2 + half)
        )
    closed = q_value * PrecisionReal.from_mpf(scale, prec, ulps=8)
    logger.debug("convolution check %s: residual %s", p, mp.nstr(closed.value - quadrature.value, 5))
    return CheckResult(quadrature, closed)
