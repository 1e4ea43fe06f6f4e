"""Weightings built from n1^j, n2^j and log|n_i|, and their Q-multiple.

A weighting is a sympy expression in the symbols n1, n2, n, L1, L2 where
L_i stands for log|n_i|.  Once n is fixed it is brought to the canonical form

    φ = Σ A_j n1^j + Σ B_j n2^j + Σ (C_j n1^j L1 + D_j n2^j L2),

with every polynomial part carried by A and B holding only negative powers.
A weighting that decays like n1^{-d-r1-r2-1} along n1 + n2 = n is Γ·Q_d^{(r1,r2)}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from divisum.exceptions import DomainError, GrowthConditionError, NotQMultipleError
from divisum.jacobi import LogLinearValue, q_eval_exact
from divisum.sums import ConvolutionParams

logger = logging.getLogger(__name__)

N1, N2, N, L1, L2 = sympy.symbols("n1 n2 n L1 L2")
SYMBOLS = {"n1": N1, "n2": N2, "n": N, "L1": L1, "L2": L2}


@dataclass(frozen=True)
class PhiWeighting:
    d: int
    r1: int
    r2: int
    n: int
    A: dict[int, Fraction] = field(default_factory=dict)
    B: dict[int, Fraction] = field(default_factory=dict)
    C: dict[int, Fraction] = field(default_factory=dict)
    D: dict[int, Fraction] = field(default_factory=dict)
    expression: sympy.Expr | None = field(default=None, compare=False)

    @property
    def params(self) -> ConvolutionParams:
        return ConvolutionParams(self.d, self.r1, self.r2, self.n)

    def rational_part(self, n1: int, n2: int) -> Fraction:
        total = sum((c * Fraction(n1) ** j for j, c in self.A.items()), Fraction(0))
        return total + sum((c * Fraction(n2) ** j for j, c in self.B.items()), Fraction(0))

    def log_coefficient(self, n2: int) -> Fraction:
        """Coefficient of log|n2| (equal to minus that of log|n1| on n1 + n2 = n)."""
        return sum((c * Fraction(n2) ** j for j, c in self.D.items()), Fraction(0))

    def evaluate(self, n1: int, n2: int) -> LogLinearValue:
        """φ(n1, n2) for n1 + n2 = n as rational + b·log|n2/n1|."""
        if n1 + n2 != self.n:
            raise DomainError(f"n1 + n2 must equal {self.n}, got {n1 + n2}")
        if n1 == 0 or n2 == 0:
            raise DomainError(f"n1 and n2 must be nonzero, got ({n1}, {n2})")
        return LogLinearValue(
            self.rational_part(n1, n2), self.log_coefficient(n2), abs(Fraction(n2, n1))
        )


def parse_weighting(text: str) -> sympy.Expr:
    """Parse a weighting written in n1, n2, n, L1, L2."""
    try:
        expr = sympy.sympify(text, locals=dict(SYMBOLS))
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise DomainError(f"cannot parse weighting {text!r}: {exc}") from exc
    unknown = expr.free_symbols - set(SYMBOLS.values())
    if unknown:
        raise DomainError(f"unknown symbols in weighting: {sorted(map(str, unknown))}")
    return expr


def _to_fraction(value: sympy.Expr) -> Fraction:
    value = sympy.nsimplify(value) if value.is_Float else value
    if not value.is_Rational:
        raise DomainError(f"coefficient {value} is not rational")
    return Fraction(int(value.p), int(value.q))


def _polynomial_coefficients(expr: sympy.Expr, var: sympy.Symbol, what: str) -> dict[int, Fraction]:
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    if den.has(var):
        raise DomainError(f"{what} must be a polynomial in {var}, got {expr}")
    poly = sympy.Poly(num, var)
    scale = _to_fraction(den)
    out = {}
    for (j,), c in zip(poly.monoms(), poly.coeffs()):
        value = _to_fraction(c) / scale
        if value:
            out[j] = value
    return out


def _log_split(expr: sympy.Expr) -> tuple[sympy.Expr, sympy.Expr, sympy.Expr]:
    """(E0, E1, E2) with expr = E0 + E1·L1 + E2·L2."""
    poly = sympy.Poly(sympy.expand(expr), L1, L2)
    allowed = {(0, 0), (1, 0), (0, 1)}
    extra = set(poly.monoms()) - allowed
    if extra:
        raise DomainError(f"logs may only appear linearly, found monomials {sorted(extra)}")
    return (
        poly.coeff_monomial(1),
        poly.coeff_monomial(L1),
        poly.coeff_monomial(L2),
    )


def _partial_fractions(E0: sympy.Expr, n: int, r1: int, r2: int):
    A: dict[int, Fraction] = {}
    B: dict[int, Fraction] = {}
    for term in sympy.Add.make_args(sympy.apart(sympy.cancel(E0), N1)):
        num, den = sympy.fraction(sympy.factor(term))
        if not den.has(N1):
            for j, c in _polynomial_coefficients(term, N1, "polynomial part").items():
                A[j] = A.get(j, Fraction(0)) + c
            continue
        poly = sympy.Poly(den, N1)
        order = poly.degree()
        lc = poly.LC()
        if num.has(N1):
            raise DomainError(f"unexpected partial fraction {term}")
        if poly == sympy.Poly(lc * N1**order, N1):
            if order > r1:
                raise DomainError(f"pole of order {order} at n1 = 0 exceeds r1 = {r1}")
            A[-order] = A.get(-order, Fraction(0)) + _to_fraction(num / lc)
        elif poly == sympy.Poly(lc * (N1 - n) ** order, N1):
            if order > r2:
                raise DomainError(f"pole of order {order} at n2 = 0 exceeds r2 = {r2}")
            # (n1 - n)^{-j} = (-1)^j n2^{-j}
            B[-order] = B.get(-order, Fraction(0)) + _to_fraction(num / lc) * (-1) ** order
        else:
            raise DomainError(f"poles are only allowed at n1 = 0 and n2 = 0, got {den}")
    return (
        {j: c for j, c in A.items() if c},
        {j: c for j, c in B.items() if c},
    )


def _expand_shifted(D: dict[int, Fraction], n: int) -> dict[int, Fraction]:
    """Σ D_j (n - n1)^j as a polynomial in n1."""
    out: dict[int, Fraction] = {}
    for j, c in D.items():
        for i in range(j + 1):
            out[i] = out.get(i, Fraction(0)) + c * math.comb(j, i) * n ** (j - i) * (-1) ** i
    return out


def laurent_at_infinity(w: PhiWeighting, order: int) -> dict[int, Fraction]:
    """Coefficients of t^i, i ≤ order, of φ(n1, n - n1) in t = 1/n1 once log|n1| drops out.

    Uses log|n - n1| = log|n1| + log(1 - n·t) for large |n1|.
    """
    n = w.n
    out: dict[int, Fraction] = {}

    def add(i: int, c: Fraction) -> None:
        if i <= order and c:
            out[i] = out.get(i, Fraction(0)) + c

    for j, c in w.A.items():
        add(-j, c)
    for j, c in w.B.items():
        # n2^{-m} = (-1)^m t^m (1 - n t)^{-m}
        m = -j
        for i in range(order - m + 1):
            add(m + i, c * (-1) ** m * math.comb(m + i - 1, i) * Fraction(n) ** i)
    log_poly = _expand_shifted(w.D, n)
    for j, c in log_poly.items():
        for i in range(1, order + j + 1):
            add(i - j, -c * Fraction(n) ** i / i)
    return {i: c for i, c in out.items() if c}


def check_growth(w: PhiWeighting) -> None:
    """φ(n1, n - n1) = O(n1^{-d-r1-r2-1}) as n1 → ±∞, or GrowthConditionError."""
    logs = dict(w.C)
    for j, c in _expand_shifted(w.D, w.n).items():
        logs[j] = logs.get(j, Fraction(0)) + c
    leftover = {j: c for j, c in logs.items() if c}
    if leftover:
        raise GrowthConditionError(
            f"log|n1| does not cancel at infinity: residual coefficients {leftover}"
        )
    order = w.d + w.r1 + w.r2
    series = laurent_at_infinity(w, order)
    if series:
        first = min(series)
        raise GrowthConditionError(
            f"weighting decays like n1^{-first}, need n1^{-order - 1}: "
            f"t^{first} coefficient is {series[first]}"
        )


def canonicalize_phi(expr: sympy.Expr | str, p: ConvolutionParams) -> PhiWeighting:
    """Canonical A/B/C/D data of a weighting at fixed n, growth-checked."""
    if isinstance(expr, str):
        expr = parse_weighting(expr)
    along = sympy.expand(expr.subs(N, p.n).subs(N2, p.n - N1))
    E0, E1, E2 = _log_split(along)
    C = _polynomial_coefficients(E1, N1, "log|n1| coefficient")
    D = _polynomial_coefficients(E2.subs(N1, p.n - N2), N2, "log|n2| coefficient")
    for name, coeffs in (("C", C), ("D", D)):
        if coeffs and max(coeffs) > p.d:
            raise DomainError(f"{name}_j is nonzero for j = {max(coeffs)} > d = {p.d}")
    A, B = _partial_fractions(E0, p.n, p.r1, p.r2)
    w = PhiWeighting(p.d, p.r1, p.r2, p.n, A, B, C, D, expression=expr)
    check_growth(w)
    logger.debug("canonical weighting at n = %d: C = %s", p.n, C)
    return w


def gamma_factor(w: PhiWeighting) -> Fraction:
    """Γ = (-1)^{d+1} n^d C_d · 2 d! (r1+r2+d)!/(r1+r2+2d)!."""
    d, r = w.d, w.r1 + w.r2
    C_d = w.C.get(d, Fraction(0))
    scale = Fraction(2 * math.factorial(d) * math.factorial(r + d), math.factorial(r + 2 * d))
    return (-1) ** (d + 1) * Fraction(w.n) ** d * C_d * scale


def sample_points(p: ConvolutionParams) -> list[tuple[int, int]]:
    """d+r1+r2+3 pairs on n1 + n2 = n with distinct |n2/n1|."""
    sign = 1 if p.n > 0 else -1
    count = p.d + p.r1 + p.r2 + 3
    return [(p.n + j * sign, -j * sign) for j in range(1, count + 1)]


def _evaluate_expression(expr: sympy.Expr, n: int, n1: int, n2: int) -> LogLinearValue:
    at = expr.subs({N: n, N1: n1, N2: n2})
    E0, E1, E2 = _log_split(at)
    e0, e1, e2 = (_to_fraction(e) for e in (E0, E1, E2))
    if e1 + e2:
        raise NotQMultipleError(f"log coefficients at ({n1}, {n2}) do not cancel: {e1} vs {e2}")
    return LogLinearValue(e0, e2, abs(Fraction(n2, n1)))


def certify(w: PhiWeighting) -> Fraction:
    """Γ, after checking φ = Γ·Q exactly at every sample point.

    Both the canonical data and, when present, the input expression are checked.
    """
    gamma = gamma_factor(w)
    p = w.params
    Q = p.q
    for n1, n2 in sample_points(p):
        expected = q_eval_exact(Q, n1, n2) * gamma
        values = [w.evaluate(n1, n2)]
        if w.expression is not None:
            values.append(_evaluate_expression(w.expression, w.n, n1, n2))
        for value in values:
            if not (value - expected).is_zero():
                raise NotQMultipleError(
                    f"φ({n1}, {n2}) = {value} differs from Γ·Q = {expected} (Γ = {gamma})"
                )
    logger.info("weighting certified as %s·Q_%d^(%d,%d)", gamma, p.d, p.r1, p.r2)
    return gamma
