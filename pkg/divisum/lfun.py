"""Completed L-values, Petersson norms and the λ_f coefficients of the cusp part.

Conventions: L*(f, s) = (2π)^{-s} Γ(s) L(f, s) and
⟨f, g⟩ = ∫_{Γ\\H} f(z) conj(g(z)) y^{k-2} dx dy over the standard fundamental domain.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp, mpf

from divisum.arith import (
    GUARD_BITS,
    PrecisionReal,
    constants,
    incomplete_gamma_upper,
)
from divisum.exceptions import DomainError, PrecisionError
from divisum.modforms import Eigenform
from divisum.sums import ConvolutionParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompletedLValue:
    form: Eigenform
    s: int
    value: PrecisionReal


@dataclass(frozen=True)
class PeterssonNorm:
    form: Eigenform
    value: PrecisionReal


def _check_s(f: Eigenform, s: int) -> None:
    if not 1 <= s <= f.weight - 1:
        raise DomainError(f"s must lie in [1, {f.weight - 1}], got {s}")


def _series_tail(k: int, M: int) -> mpf:
    """Bound on Σ_{m ≥ M} of the L-series terms.

    Uses |a_m| ≤ 2m^{k/2} and Γ(a, x) ≤ 2x^{a-1}e^{-x} for x ≥ 2(a-1).
    """
    with mp.workprec(64):
        if 2 * mp.pi * M < 2 * (k - 1):
            raise PrecisionError(f"{M} coefficients are too few for weight {k}")
        first = 8 * mpf(M) ** (mpf(k) / 2) / (2 * mp.pi * M) * mp.exp(-2 * mp.pi * M)
        ratio = (mpf(M + 1) / M) ** (mpf(k) / 2) * mp.exp(-2 * mp.pi)
        return first / (1 - ratio)


@lru_cache(maxsize=None)
def completed_L(f: Eigenform, s: int, prec: int) -> CompletedLValue:
    """L*(f, s) = Σ a_m [(2πm)^{-s} Γ(s, 2πm) + (-1)^{k/2} (2πm)^{s-k} Γ(k-s, 2πm)]."""
    _check_s(f, s)
    k = f.weight
    sign = (-1) ** (k // 2)
    two_pi = constants(prec).pi * 2
    total = PrecisionReal.exact(0, prec)
    for m in range(1, f.M):
        a = f.a(m)
        if a.value == 0 and a.error_radius == 0:
            continue
        x = two_pi * m
        near = incomplete_gamma_upper(s, x, prec) / x**s
        far = incomplete_gamma_upper(k - s, x, prec) / x ** (k - s)
        total = total + a * (near + far * sign)
    tail = _series_tail(k, f.M)
    value = PrecisionReal(total.value, total.error_radius + tail, prec)
    return CompletedLValue(f, s, value)


def l_value(f: Eigenform, s: int, prec: int) -> PrecisionReal:
    """L(f, s) = (2π)^s L*(f, s)/(s-1)!."""
    star = completed_L(f, s, prec).value
    return star * (constants(prec).pi * 2) ** s / math.factorial(s - 1)


def _eval_on_imaginary_axis(coeffs: list[mpf], y: mpf) -> mpf:
    q = mp.exp(-2 * mp.pi * y)
    total = mpf(0)
    for a in reversed(coeffs):
        total = total * q + a
    return total


def completed_L_by_quadrature(f: Eigenform, s: int, prec: int) -> PrecisionReal:
    """∫₀^∞ f(iy) y^{s-1} dy, folded onto [1, ∞) with y → 1/y."""
    _check_s(f, s)
    k = f.weight
    sign = (-1) ** (k // 2)
    work = prec + GUARD_BITS
    with mp.workprec(work):
        coeffs = [c.value for c in f.coeffs]

        def integrand(y):
            return _eval_on_imaginary_axis(coeffs, y) * (
                y ** (s - 1) + sign * y ** (k - s - 1)
            )

        value, err = mp.quad(integrand, [1, 2, mp.inf], error=True)
    result = PrecisionReal.from_mpf(value, prec)
    return PrecisionReal(result.value, result.error_radius + err, prec)


@lru_cache(maxsize=None)
def petersson_norm(f: Eigenform, prec: int) -> PeterssonNorm:
    """⟨f, f⟩ over {|x| ≤ 1/2, |z| ≥ 1}.

    The strip y ≥ 1 is summed in closed form. On √3/2 ≤ y ≤ 1 the x-integral over
    √(1-y²) ≤ |x| ≤ 1/2 is also closed form, leaving an analytic integral in θ
    with y = cos θ that Gauss-Legendre handles.
    """
    k = f.weight
    work = prec + GUARD_BITS
    with mp.workprec(work):
        a = [c.value for c in f.coeffs]
        M = len(a)
        upper = mpf(0)
        for m in range(1, M):
            x = 4 * mp.pi * m
            upper += a[m] ** 2 * mp.gammainc(k - 1, a=x) / x ** (k - 1)

        def integrand(theta):
            y, c = mp.cos(theta), mp.sin(theta)
            q = mp.exp(-2 * mp.pi * y)
            b = [mpf(0)] * M
            qm = mpf(1)
            for m in range(1, M):
                qm *= q
                b[m] = a[m] * qm
            total = (1 - 2 * c) * mp.fsum(v * v for v in b)
            for j in range(1, M - 1):
                lag = mp.fsum(b[m] * b[m + j] for m in range(1, M - j))
                total -= 2 * lag * mp.sin(2 * mp.pi * j * c) / (mp.pi * j)
            return total * y ** (k - 2) * mp.sin(theta)

        lower, quad_err = mp.quad(
            integrand, [0, mp.pi / 6], method="gauss-legendre", error=True
        )
        value = upper + lower
        relative = max(
            (c.error_radius / abs(c.value) for c in f.coeffs if c.value != 0),
            default=mpf(0),
        )
        err = quad_err + abs(value) * (2 * relative + mpf(2) ** (-prec))
    if value <= err:
        raise PrecisionError(f"Petersson norm of weight-{k} form is not positive")
    logger.debug("<f,f> for weight %d tag %d: %s", k, f.conjugacy_tag, mp.nstr(value, 12))
    result = PrecisionReal.from_mpf(value, prec)
    return PeterssonNorm(f, PrecisionReal(result.value, result.error_radius + err, prec))


def lambda_coeff(p: ConvolutionParams, f: Eigenform, prec: int) -> PrecisionReal:
    """λ_f = π(-1)^{d+r2/2+1} 2^{-k} C(k-2, d) L*(f, d+1) L*(f, r1+d+1)/⟨f, f⟩."""
    if f.weight != p.k:
        raise DomainError(f"eigenform has weight {f.weight}, identity needs {p.k}")
    sign = (-1) ** (p.d + p.r2 // 2 + 1)
    scale = math.comb(p.k - 2, p.d) * sign
    numerator = (
        completed_L(f, p.d + 1, prec).value
        * completed_L(f, p.r1 + p.d + 1, prec).value
        * constants(prec).pi
        * scale
    )
    return numerator / (petersson_norm(f, prec).value * 2**p.k)


def lambda_coeffs(
    p: ConvolutionParams, forms: list[Eigenform], prec: int
) -> list[PrecisionReal]:
    return [lambda_coeff(p, f, prec) for f in forms]


def _split_degree(f: Eigenform, k1: int, k2: int, m1: int, m2: int) -> int:
    if 2 * k1 + 2 * k2 != f.weight:
        raise DomainError(f"2k1 + 2k2 = {2 * k1 + 2 * k2} differs from weight {f.weight}")
    if min(k1, k2, m1, m2) < 0 or k1 < m1 or k2 < m2:
        raise DomainError(f"need k_i >= m_i >= 0, got k=({k1}, {k2}) m=({m1}, {m2})")
    d = k1 + k2 - m1 - m2 - 1
    if d < 0:
        raise DomainError(f"m1 + m2 must be below k1 + k2, got ({m1}, {m2})")
    return d


def inner_product_alternate(
    f: Eigenform, k1: int, k2: int, m1: int, m2: int, prec: int
) -> PrecisionReal:
    """2(-1)^{k2+m2-m1-d-1} π^k L*(f, d+1) L*(f, r1+d+1)."""
    d = _split_degree(f, k1, k2, m1, m2)
    sign = (-1) ** (k2 + m2 - m1 - d - 1)
    lvalues = completed_L(f, d + 1, prec).value * completed_L(f, 2 * m1 + d + 1, prec).value
    return lvalues * constants(prec).pi ** f.weight * (2 * sign)


def inner_product_eisenstein_product(
    f: Eigenform, k1: int, k2: int, m1: int, m2: int, prec: int
) -> PrecisionReal:
    """⟨f, E*_{2k1}(·, m1+1/2) E*_{2k2}(·, m2+1/2) y^{-k1-k2}⟩ = 2(-1)^{k2} π^k L*(f, d+1) L*(f, r2+d+1).

    The functional-equation form with L*(f, r1+d+1) must agree within error radii.
    """
    d = _split_degree(f, k1, k2, m1, m2)
    lvalues = completed_L(f, d + 1, prec).value * completed_L(f, 2 * m2 + d + 1, prec).value
    value = lvalues * constants(prec).pi ** f.weight * (2 * (-1) ** k2)
    alternate = inner_product_alternate(f, k1, k2, m1, m2, prec)
    if not value.overlaps(alternate):
        raise PrecisionError(
            f"inner product forms disagree: {value!r} vs {alternate!r}"
        )
    return value
