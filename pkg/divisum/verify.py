"""Checks of the convolution identity, cusp-coefficient extraction and the
printed-identity and physics cancellation checks built on top of them."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import sympy
from mpmath import mp, mpf

from divisum.arith import PrecisionReal
from divisum.boundary import z_part, z_part_expression
from divisum.cache import get_eigenforms
from divisum.exceptions import DomainError, ExtrapolationError
from divisum.identities import PrintedIdentity
from divisum.lfun import completed_L, l_value, lambda_coeffs
from divisum.modforms import (
    Eigenform,
    coefficient_count,
    dim_cusp,
    victor_miller_basis,
)
from divisum.schemas import CliConfig
from divisum.sums import ConvolutionParams, TailEstimate, lhs_extrapolated
from divisum.weights import canonicalize_phi, certify

logger = logging.getLogger(__name__)

# Floor for the relative part of the pass rule when the RHS is zero.
TINY = mpf(10) ** -30
CUSP_REL_TOL = mpf(10) ** -6


@dataclass(frozen=True)
class Schedule:
    """Doubling schedule of the left-hand side: base_N·2^i for i < levels."""

    base_N: int
    levels: int
    terms: int

    @classmethod
    def from_config(cls, config: CliConfig) -> Schedule:
        return cls(config.base_N, config.levels, config.extrap_terms)


# Right-hand side


@dataclass
class RhsPrediction:
    value: PrecisionReal
    z_part: PrecisionReal
    cusp_part: PrecisionReal
    forms: list[Eigenform] = field(default_factory=list)
    lambdas: list[PrecisionReal] = field(default_factory=list)
    contributions: list[PrecisionReal] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.forms)


def eigenforms_for(
    weight: int, prec: int, n_max: int = 1, cache_dir: str | None = None
) -> list[Eigenform]:
    if dim_cusp(weight) == 0:
        return []
    M = coefficient_count(prec, weight, n_max)
    return get_eigenforms(weight, M, prec, cache_dir)


def rhs_components(
    p: ConvolutionParams, prec: int, cache_dir: str | None = None
) -> RhsPrediction:
    """Z-part plus a_{|n|}/|n|^d with a_m = Σ_f λ_f a_m(f)."""
    zp = z_part(p, prec)
    m = abs(p.n)
    forms = eigenforms_for(p.k, prec, m, cache_dir)
    lambdas = lambda_coeffs(p, forms, prec)
    contributions = [lam * f.a(m) for lam, f in zip(lambdas, forms)]
    cusp = sum(contributions, PrecisionReal.exact(0, prec)) / Fraction(m) ** p.d
    return RhsPrediction(zp + cusp, zp, cusp, forms, lambdas, contributions)


def rhs_predict(p: ConvolutionParams, prec: int, cache_dir: str | None = None) -> PrecisionReal:
    return rhs_components(p, prec, cache_dir).value


# Identity checks


@dataclass
class PrintedCheck:
    """The raw identity rescaled by the Γ-factor derived from a printed weighting."""

    name: str
    gamma: Fraction
    lhs: PrecisionReal | None
    rhs: PrecisionReal
    rhs_expression: str
    rhs_matches: bool
    cusp_matches: bool

    @property
    def passed(self) -> bool:
        return self.rhs_matches and self.cusp_matches


@dataclass
class VerificationReport:
    params: ConvolutionParams
    lhs: TailEstimate
    rhs: PrecisionReal
    prediction: RhsPrediction
    residual: mpf | None
    passed: bool
    rel_tol: float
    wall_ms: float = 0.0
    printed: PrintedCheck | None = None

    @property
    def rigorous(self) -> bool:
        return self.lhs.rigorous


def passes(lhs: PrecisionReal, rhs: PrecisionReal, rel_tol: float) -> tuple[mpf, bool]:
    """Residual and whether it is within rel_tol·|rhs| plus three combined radii."""
    with mp.workprec(max(lhs.precision_bits, rhs.precision_bits)):
        residual = abs(lhs.value - rhs.value)
        allowed = mpf(rel_tol) * max(abs(rhs.value), TINY) + 3 * (
            lhs.error_radius + rhs.error_radius
        )
        return residual, residual <= allowed


def verify_identity(
    p: ConvolutionParams,
    schedule: Schedule,
    prec: int,
    rel_tol: float = 1e-6,
    cache_dir: str | None = None,
    jobs: int = 1,
) -> VerificationReport:
    """Extrapolated left-hand side against the predicted right-hand side.

    A failed extrapolation yields a failing report rather than an exception.
    """
    start = time.perf_counter()
    lhs = lhs_extrapolated(p, schedule.base_N, schedule.levels, schedule.terms, prec, jobs)
    prediction = rhs_components(p, prec, cache_dir)
    residual, ok = None, False
    if lhs.extrapolated is not None:
        residual, ok = passes(lhs.extrapolated, prediction.value, rel_tol)
    wall_ms = (time.perf_counter() - start) * 1000
    logger.info(
        "(d, r1, r2, n) = (%d, %d, %d, %d): residual %s, %s",
        p.d, p.r1, p.r2, p.n,
        mp.nstr(residual, 5) if residual is not None else "n/a",
        "pass" if ok else "FAIL",
    )
    return VerificationReport(
        p, lhs, prediction.value, prediction, residual, ok, rel_tol, wall_ms
    )


def verify_range(
    d: int,
    r1: int,
    r2: int,
    ns: list[int],
    schedule: Schedule,
    prec: int,
    rel_tol: float = 1e-6,
    cache_dir: str | None = None,
    jobs: int = 1,
) -> list[VerificationReport]:
    return [
        verify_identity(ConvolutionParams(d, r1, r2, n), schedule, prec, rel_tol, cache_dir, jobs)
        for n in sorted(ns)
    ]


# Cusp coefficients from the left-hand side


@dataclass
class CuspExtraction:
    d: int
    r1: int
    r2: int
    coefficients: list[PrecisionReal]
    dim: int
    fitted: list[mpf]
    max_deviation: mpf
    consistent: bool
    expected: list[PrecisionReal] = field(default_factory=list)
    expected_deviation: mpf | None = None

    @property
    def weight(self) -> int:
        return 2 * self.d + self.r1 + self.r2 + 2


def extract_cusp_coeffs(
    d: int,
    r1: int,
    r2: int,
    n_max: int,
    schedule: Schedule,
    prec: int,
    cache_dir: str | None = None,
    jobs: int = 1,
) -> CuspExtraction:
    """a_n = n^d·(LHS - z_part) for n = 1..n_max, checked against S_k.

    For dim S_k > 0 the values are fitted to the Victor Miller basis by least
    squares and compared with h = Σ λ_f f.
    """
    k = 2 * d + r1 + r2 + 2
    dim = dim_cusp(k)
    if n_max < dim + 2:
        raise DomainError(f"n_max must be at least dim + 2 = {dim + 2}, got {n_max}")
    coefficients = []
    for n in range(1, n_max + 1):
        p = ConvolutionParams(d, r1, r2, n)
        tail = lhs_extrapolated(p, schedule.base_N, schedule.levels, schedule.terms, prec, jobs)
        if tail.extrapolated is None:
            raise ExtrapolationError(
                f"no limit for n = {n}: {tail.failure}", [s for _, s in tail.partial_sums]
            )
        coefficients.append((tail.extrapolated - z_part(p, prec)) * n**d)
    noise = max(c.error_radius for c in coefficients)

    if dim == 0:
        deviation = max(abs(c.value) for c in coefficients)
        return CuspExtraction(
            d, r1, r2, coefficients, 0, [mpf(0)] * n_max, deviation, deviation <= 3 * noise
        )

    basis = victor_miller_basis(k, n_max + 1)
    with mp.workprec(prec):
        A = mp.matrix([[mpf(int(f[m])) for f in basis] for m in range(1, n_max + 1)])
        b = mp.matrix([c.value for c in coefficients])
        x, _ = mp.qr_solve(A, b)
        fitted = [mp.fsum(x[j] * int(basis[j][m]) for j in range(dim)) for m in range(1, n_max + 1)]
        deviation = max(abs(c.value - f) for c, f in zip(coefficients, fitted))

    p = ConvolutionParams(d, r1, r2, 1)
    forms = eigenforms_for(k, prec, n_max, cache_dir)
    lambdas = lambda_coeffs(p, forms, prec)
    expected = [
        sum((lam * f.a(m) for lam, f in zip(lambdas, forms)), PrecisionReal.exact(0, prec))
        for m in range(1, n_max + 1)
    ]
    with mp.workprec(prec):
        expected_deviation = max(
            abs(c.value - h.value) / max(abs(h.value), TINY)
            for c, h in zip(coefficients, expected)
        )
    logger.info(
        "weight %d: fit deviation %s, relative deviation from Σλf %s",
        k, mp.nstr(deviation, 5), mp.nstr(expected_deviation, 5),
    )
    return CuspExtraction(
        d, r1, r2, coefficients, dim, fitted, deviation, deviation <= 3 * noise,
        expected, expected_deviation,
    )


# Printed identities


def _printed_rhs_matches(
    gamma: Fraction, p: ConvolutionParams, identity: PrintedIdentity
) -> tuple[bool, str]:
    derived = sympy.Rational(gamma.numerator, gamma.denominator) * z_part_expression(p)
    difference = sympy.expand(sympy.expand_log(derived - identity.rhs_expression(), force=True))
    return sympy.simplify(difference) == 0, str(sympy.simplify(derived))


def _match_form(forms: list[Eigenform], a2: str, prec: int) -> Eigenform:
    digits = math.ceil(prec * math.log10(2)) + 5
    with mp.workprec(prec + 16):
        target = mpf(str(sympy.N(sympy.sympify(a2), digits)))
        best = min(forms, key=lambda f: abs(f.a(2).value - target))
        if abs(best.a(2).value - target) > mpf(10) ** -20 * (1 + abs(target)):
            raise DomainError(f"no eigenform of weight {best.weight} has a_2 = {a2}")
    return best


def printed_cusp_matches(
    identity: PrintedIdentity, gamma: Fraction, p: ConvolutionParams, prec: int,
    cache_dir: str | None = None,
) -> bool:
    """Γ·λ_f against the printed multiple of L(f, s_num)/L(f, s_den), per eigenform."""
    if not identity.cusp:
        return True
    forms = eigenforms_for(p.k, prec, 2, cache_dir)
    lambdas = dict(zip((f.conjugacy_tag for f in forms), lambda_coeffs(p, forms, prec)))
    digits = math.ceil(prec * math.log10(2)) + 5
    for printed in identity.cusp:
        f = _match_form(forms, printed.a2, prec) if printed.a2 else forms[0]
        derived = lambdas[f.conjugacy_tag] * gamma
        with mp.workprec(prec + 16):
            scale = mpf(str(sympy.N(sympy.sympify(printed.coefficient), digits)))
        expected = l_value(f, printed.s_num, prec) / l_value(f, printed.s_den, prec) * scale
        with mp.workprec(prec):
            relative = abs(derived.value - expected.value) / abs(expected.value)
        logger.info(
            "%s: Γ·λ_f = %s, printed %s (relative difference %s)",
            identity.name, derived, expected, mp.nstr(relative, 5),
        )
        if relative > CUSP_REL_TOL:
            return False
    return True


def verify_printed(
    identity: PrintedIdentity,
    ns: list[int],
    schedule: Schedule,
    prec: int,
    rel_tol: float = 1e-6,
    cache_dir: str | None = None,
    jobs: int = 1,
) -> list[VerificationReport]:
    """Derive Γ from the printed weighting, certify φ = Γ·Q, then check the identity."""
    reports = []
    cusp_ok: bool | None = None
    for n in sorted(ns):
        p = ConvolutionParams(identity.d, identity.r1, identity.r2, n)
        gamma = certify(canonicalize_phi(identity.weighting, p))
        rhs_ok, rhs_text = _printed_rhs_matches(gamma, p, identity)
        if cusp_ok is None:
            cusp_ok = printed_cusp_matches(identity, gamma, p, prec, cache_dir)
        report = verify_identity(p, schedule, prec, rel_tol, cache_dir, jobs)
        lhs = report.lhs.extrapolated
        report.printed = PrintedCheck(
            identity.name,
            gamma,
            lhs * gamma if lhs is not None else None,
            report.rhs * gamma,
            rhs_text,
            rhs_ok,
            cusp_ok,
        )
        report.passed = report.passed and report.printed.passed
        reports.append(report)
    return reports


# Physics cancellation

ALPHA5 = sympy.Rational(-135, 52) / sympy.pi**3
BETA5 = sympy.Rational(-30375, 832) / sympy.pi**5
GAMMA5 = sympy.Rational(-42525, 832) / sympy.pi**5

# (r1, r2, d) and the weight multiplying D(r1, r2, d)
CANCELLATION_TERMS = (
    ((2, 2, 3), sympy.Rational(4032, 5) / sympy.pi**4 * ALPHA5),
    ((4, 4, 1), sympy.Rational(7168, 5) / sympy.pi**2 * BETA5),
    ((2, 6, 1), sympy.Rational(3072, 5) / sympy.pi**2 * GAMMA5),
)

L_SYMBOLS = {s: sympy.Symbol(f"L{s}") for s in (2, 4, 6)}

# The printed combination of L(Δ, s) values.
PRINTED_COMBINATION = (
    -sympy.Rational(382725, 53248) * L_SYMBOLS[2] * L_SYMBOLS[4] / sympy.pi**13
    - sympy.Rational(1148175, 26624) * L_SYMBOLS[4] * L_SYMBOLS[6] / sympy.pi**17
    + sympy.Rational(3189375, 53248) * L_SYMBOLS[2] * L_SYMBOLS[6] / sympy.pi**15
)


def _completed_symbol(s: int) -> sympy.Expr:
    return (2 * sympy.pi) ** -s * sympy.factorial(s - 1) * L_SYMBOLS[s]


def d_coefficient_symbolic(r1: int, r2: int, d: int) -> sympy.Expr:
    """D(r1, r2, d) = (-1)^{d+r2/2+1} 2^{-k} L*(d+1) L*(d+r1+1) C(k-2, d), k = 2d+r1+r2+2."""
    k = 2 * d + r1 + r2 + 2
    sign = (-1) ** (d + r2 // 2 + 1)
    return (
        sign * sympy.Rational(math.comb(k - 2, d), 2**k)
        * _completed_symbol(d + 1) * _completed_symbol(d + r1 + 1)
    )


def d_route_symbolic() -> sympy.Expr:
    return sum(
        (weight * d_coefficient_symbolic(*params) for params, weight in CANCELLATION_TERMS),
        sympy.Integer(0),
    )


def d_coefficient(f: Eigenform, r1: int, r2: int, d: int, prec: int) -> PrecisionReal:
    k = 2 * d + r1 + r2 + 2
    if f.weight != k:
        raise DomainError(f"D({r1}, {r2}, {d}) needs weight {k}, got {f.weight}")
    sign = (-1) ** (d + r2 // 2 + 1)
    product = completed_L(f, d + 1, prec).value * completed_L(f, d + r1 + 1, prec).value
    return product * Fraction(sign * math.comb(k - 2, d), 2**k)


def _sympy_real(expr: sympy.Expr, prec: int) -> PrecisionReal:
    """A π-rational constant as a ball."""
    digits = math.ceil(prec * math.log10(2)) + 10
    with mp.workprec(prec + 32):
        value = mpf(str(sympy.N(expr, digits)))
    return PrecisionReal.from_mpf(value, prec, ulps=2)


@dataclass
class PhysicsReport:
    precision_bits: int
    value: PrecisionReal
    route_d: PrecisionReal
    route_difference: mpf
    routes_agree_exactly: bool
    perturbation_shift: mpf
    tolerance: mpf
    passed: bool
    wall_ms: float = 0.0


def physics_tolerance(prec: int) -> mpf:
    if prec >= 256:
        return mpf(10) ** -40
    if prec >= 128:
        return mpf(10) ** -30
    return mpf(2) ** (-prec // 2)


def _printed_value(l_values: dict[int, PrecisionReal], prec: int) -> PrecisionReal:
    total = PrecisionReal.exact(0, prec)
    for term in sympy.Add.make_args(PRINTED_COMBINATION):
        coefficient, rest = term.as_independent(*L_SYMBOLS.values())
        ball = _sympy_real(coefficient, prec)
        for s, symbol in L_SYMBOLS.items():
            if rest.has(symbol):
                ball = ball * l_values[s]
        total = total + ball
    return total


def physics_cancellation(prec: int, cache_dir: str | None = None) -> PhysicsReport:
    """The printed combination of L(Δ, s) values and its rebuild from D(r1, r2, d).

    The D-route reproduces the printed combination with opposite sign.
    """
    start = time.perf_counter()
    delta = eigenforms_for(12, prec, 1, cache_dir)[0]
    l_values = {s: l_value(delta, s, prec) for s in L_SYMBOLS}
    value = _printed_value(l_values, prec)

    route_d = PrecisionReal.exact(0, prec)
    for (r1, r2, d), weight in CANCELLATION_TERMS:
        route_d = route_d + d_coefficient(delta, r1, r2, d, prec) * _sympy_real(weight, prec)
    with mp.workprec(prec):
        difference = abs(route_d.value + value.value)
    exact = sympy.simplify(sympy.expand(d_route_symbolic() + PRINTED_COMBINATION)) == 0

    bumped = dict(l_values)
    bumped[2] = l_values[2] * (1 + PrecisionReal.from_mpf(mpf(10) ** -20, prec))
    with mp.workprec(prec):
        shift = abs(_printed_value(bumped, prec).value - value.value)

    tolerance = physics_tolerance(prec)
    passed = (
        abs(value.value) <= tolerance
        and exact
        and difference <= tolerance
        and shift > tolerance
    )
    logger.info(
        "cancellation at %d bits: %s (shift under perturbation %s)",
        prec, value, mp.nstr(shift, 5),
    )
    return PhysicsReport(
        prec, value, route_d, difference, exact, shift, tolerance, passed,
        (time.perf_counter() - start) * 1000,
    )

