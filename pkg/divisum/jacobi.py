"""Jacobi polynomials and Jacobi functions of the second kind in closed form.

For integer parameters Q_d^{(α,β)} is elementary:

    Q(x) = P(x)·log|(x+1)/(x-1)| + R(x) / ((x-1)^α (x+1)^β)

with P = (-1)^α/2 · P_d^{(α,β)} and R a rational polynomial read off a formal
Laurent series at infinity.  Values at rational points are exact
``LogLinearValue`` objects.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf

from divisum.arith import (
    GUARD_BITS,
    PrecisionReal,
    constants,
    exact_abs,
    to_mpf,
    unit_roundoff,
)
from divisum.exceptions import DomainError, SingularArgumentError

logger = logging.getLogger(__name__)

# |x| from which the ₂F₁ series at z = 2/(1+|x|) replaces the closed form.
FAR_FIELD = 3


# Polynomials


@dataclass(frozen=True)
class PolyRational:
    """Polynomial with exact rational coefficients, index j ↔ x^j."""

    coefficients: tuple[Fraction, ...] = ()

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def evaluate_mpf(self, x: mpf) -> mpf:
        acc = mpf(0)
        for c in reversed(self.coefficients):
            acc = acc * x + mpf(c.numerator) / c.denominator
        return acc

    def __add__(self, other: PolyRational) -> PolyRational:
        n = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [Fraction(0)] * (n - len(self.coefficients))
        b = list(other.coefficients) + [Fraction(0)] * (n - len(other.coefficients))
        return PolyRational(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other: PolyRational | Fraction | int) -> PolyRational:
        if not isinstance(other, PolyRational):
            return PolyRational(tuple(c * other for c in self.coefficients))
        if self.is_zero() or other.is_zero():
            return PolyRational()
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return PolyRational(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> PolyRational:
        result = PolyRational((Fraction(1),))
        for _ in range(exponent):
            result = result * self
        return result

    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """Integer numerators over one common positive denominator."""
        den = math.lcm(1, *(c.denominator for c in self.coefficients))
        return tuple(int(c * den) for c in self.coefficients), den


def _check_nonnegative(**params: int) -> None:
    for name, value in params.items():
        if not isinstance(value, int) or value < 0:
            raise DomainError(f"{name} must be a nonnegative integer, got {value!r}")


def _check_q_params(d: int, alpha: int, beta: int, min_degree: int = 1) -> None:
    _check_nonnegative(d=d, alpha=alpha, beta=beta)
    if d < min_degree:
        raise DomainError(f"d must be >= {min_degree}, got {d}")
    if alpha % 2 or beta % 2:
        raise DomainError(f"only even alpha, beta are supported, got ({alpha}, {beta})")


@lru_cache(maxsize=None)
def jacobi_polynomial(d: int, alpha: int, beta: int) -> PolyRational:
    """P_d^{(α,β)}(x) = Σ_s C(d+α, d-s) C(d+β, s) ((x-1)/2)^s ((x+1)/2)^{d-s}."""
    _check_nonnegative(d=d, alpha=alpha, beta=beta)
    minus = PolyRational((Fraction(-1, 2), Fraction(1, 2)))
    plus = PolyRational((Fraction(1, 2), Fraction(1, 2)))
    total = PolyRational()
    for s in range(d + 1):
        weight = math.comb(d + alpha, d - s) * math.comb(d + beta, s)
        total = total + (minus**s) * (plus ** (d - s)) * weight
    return total


# Truncated power series in X = 1/x


def _series_mul(a: list[Fraction], b: list[Fraction], length: int) -> list[Fraction]:
    out = [Fraction(0)] * length
    for i, x in enumerate(a[:length]):
        if x == 0:
            continue
        for j, y in enumerate(b[: length - i]):
            out[i + j] += x * y
    return out


def _binomial_series(exponent: int, sign: int, length: int) -> list[Fraction]:
    """(1 + sign·X)^exponent for any integer exponent, truncated."""
    out = []
    for i in range(length):
        if exponent >= 0:
            c = math.comb(exponent, i) if i <= exponent else 0
        else:
            c = (-1) ** i * math.comb(-exponent + i - 1, i)
        out.append(Fraction(c * sign**i))
    return out


def _log_ratio_series(length: int) -> list[Fraction]:
    """log((1+X)/(1-X)) = 2 Σ_{i odd} X^i / i."""
    return [Fraction(2, i) if i % 2 else Fraction(0) for i in range(length)]


@dataclass(frozen=True)
class LogLinearValue:
    """Exact a + b·log(u·π^pi_power) with a, b rational and u a positive rational."""

    a: Fraction
    b: Fraction = Fraction(0)
    u: Fraction = Fraction(1)
    pi_power: int = 0

    def __post_init__(self):
        a, b, u, p = Fraction(self.a), Fraction(self.b), Fraction(self.u), self.pi_power
        if u <= 0:
            raise DomainError(f"log argument must be positive, got {u}")
        if p < 0 or (p == 0 and u < 1):
            u, p, b = 1 / u, -p, -b
        if b == 0 or (u == 1 and p == 0):
            b, u, p = Fraction(0), Fraction(1), 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "pi_power", p)

    def _same_log(self, other: LogLinearValue) -> bool:
        return (self.u, self.pi_power) == (other.u, other.pi_power)

    def __add__(self, other: LogLinearValue | Fraction | int) -> LogLinearValue:
        if not isinstance(other, LogLinearValue):
            return LogLinearValue(self.a + other, self.b, self.u, self.pi_power)
        if other.b == 0:
            return LogLinearValue(self.a + other.a, self.b, self.u, self.pi_power)
        if self.b == 0:
            return LogLinearValue(self.a + other.a, other.b, other.u, other.pi_power)
        if not self._same_log(other):
            raise DomainError("cannot add LogLinearValues with different log arguments")
        return LogLinearValue(self.a + other.a, self.b + other.b, self.u, self.pi_power)

    __radd__ = __add__

    def __neg__(self) -> LogLinearValue:
        return LogLinearValue(-self.a, -self.b, self.u, self.pi_power)

    def __sub__(self, other: LogLinearValue | Fraction | int) -> LogLinearValue:
        return self + (-other)

    def __mul__(self, scale: Fraction | int) -> LogLinearValue:
        if isinstance(scale, LogLinearValue):
            return NotImplemented
        return LogLinearValue(self.a * scale, self.b * scale, self.u, self.pi_power)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_real(self, prec: int) -> PrecisionReal:
        result = PrecisionReal.exact(self.a, prec)
        if self.b == 0:
            return result
        with mp.workprec(prec + GUARD_BITS):
            log_u = mp.log(to_mpf(self.u, prec + GUARD_BITS))
        log_arg = PrecisionReal.from_mpf(log_u, prec)
        if self.pi_power:
            log_arg = log_arg + constants(prec).pi.log() * self.pi_power
        return result + log_arg * self.b

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        arg = str(self.u) if self.pi_power == 0 else f"{self.u}·π^{self.pi_power}"
        return f"{self.a} + ({self.b})·log({arg})"


@dataclass(frozen=True)
class QSecondKind:
    """Closed form of Q_d^{(α,β)} as the polynomial pair (P, R)."""

    d: int
    alpha: int
    beta: int
    P: PolyRational
    R: PolyRational

    @property
    def decay_order(self) -> int:
        return self.d + self.alpha + self.beta + 1

    @property
    def asymptotic_constant(self) -> Fraction:
        return q_asymptotic_constant(self.d, self.alpha, self.beta)


def q_asymptotic_constant(d: int, alpha: int, beta: int) -> Fraction:
    """C with Q_d^{(α,β)}(x) ~ C·x^{-d-α-β-1} as x → ∞."""
    _check_nonnegative(d=d, alpha=alpha, beta=beta)
    num = 2 ** (d + alpha + beta) * math.factorial(d + alpha) * math.factorial(d + beta)
    return Fraction(num, math.factorial(2 * d + alpha + beta + 1))


def _log_part_series(d: int, alpha: int, beta: int, P: PolyRational, length: int):
    """Series A(X) with (x-1)^α (x+1)^β P(x) log((x+1)/(x-1)) = X^{-α-β-d} A(X)."""
    reversed_p = [P.coefficients[d - i] if d - i <= P.degree else Fraction(0)
                  for i in range(d + 1)]
    series = _series_mul(_binomial_series(alpha, -1, length),
                         _binomial_series(beta, 1, length), length)
    series = _series_mul(series, reversed_p, length)
    return _series_mul(series, _log_ratio_series(length), length)


def q_construct(d: int, alpha: int, beta: int) -> QSecondKind:
    """Build (P, R) so that the closed form decays like x^{-d-α-β-1}."""
    _check_q_params(d, alpha, beta)
    return jacobi_second_kind(d, alpha, beta)


@lru_cache(maxsize=None)
def jacobi_second_kind(d: int, alpha: int, beta: int) -> QSecondKind:
    """Second-kind function of any degree d >= 0; Q_0^{(0,0)} = ½·log((x+1)/(x-1))."""
    _check_q_params(d, alpha, beta, min_degree=0)
    P = jacobi_polynomial(d, alpha, beta) * Fraction((-1) ** alpha, 2)
    top = alpha + beta + d
    A = _log_part_series(d, alpha, beta, P, top + 1)
    R = PolyRational(tuple(-A[top - m] for m in range(top + 1)))
    logger.debug("constructed Q_%d^(%d,%d): deg R = %d", d, alpha, beta, R.degree)
    return QSecondKind(d=d, alpha=alpha, beta=beta, P=P, R=R)


def laurent_at_infinity(Q: QSecondKind, order: int) -> list[Fraction]:
    """Coefficients c_0..c_order with Q(x) = Σ c_j x^{-j} for |x| > 1."""
    d, alpha, beta = Q.d, Q.alpha, Q.beta
    top = alpha + beta + d
    length = order + d + 1
    T = _log_part_series(d, alpha, beta, Q.P, max(length, top + 1))
    for m, c in enumerate(Q.R.coefficients):
        T[top - m] += c
    series = _series_mul(T, _binomial_series(-alpha, -1, length), length)
    series = _series_mul(series, _binomial_series(-beta, 1, length), length)
    return [series[j + d] for j in range(order + 1)]


def tail_constants(Q: QSecondKind, x0: Fraction | int = FAR_FIELD) -> tuple[Fraction, Fraction]:
    """(C', x0) with |Q(x)| ≤ C'·|x|^{-D} for |x| ≥ x0.

    From the integral representation |Q(x)| ≤ C·(|x|-1)^{-D}, D = d+α+β+1.
    """
    x0 = Fraction(x0)
    if x0 <= 1:
        raise DomainError(f"x0 must exceed 1, got {x0}")
    D = Q.decay_order
    return Q.asymptotic_constant * (x0 / (x0 - 1)) ** D, x0


# Evaluation


def q_eval_at(Q: QSecondKind, x: Fraction | int) -> LogLinearValue:
    x = Fraction(x)
    if x in (1, -1):
        raise SingularArgumentError(f"Q is singular at x = {x}")
    rational = Q.R(x) / ((x - 1) ** Q.alpha * (x + 1) ** Q.beta)
    return LogLinearValue(rational, Q.P(x), abs((x + 1) / (x - 1)))


def q_eval_exact(Q: QSecondKind, n1: int, n2: int) -> LogLinearValue:
    """Q((n2-n1)/(n1+n2)) as a + b·log|n2/n1|."""
    if n1 + n2 == 0:
        raise SingularArgumentError("n1 + n2 = 0 sends the argument to infinity")
    if n1 == 0 or n2 == 0:
        raise SingularArgumentError(f"n1 and n2 must be nonzero, got ({n1}, {n2})")
    return q_eval_at(Q, Fraction(n2 - n1, n1 + n2))


def _as_mpf(x, prec: int) -> mpf:
    if isinstance(x, (int, Fraction)):
        return to_mpf(x, prec)
    with mp.workprec(prec):
        return +mpf(x)


def _rounded(value: mpf, err: mpf, prec: int) -> PrecisionReal:
    """Round a higher-precision value into a ball at prec."""
    with mp.workprec(prec):
        rounded = +value
        radius = err + exact_abs(value - rounded) + exact_abs(rounded) * unit_roundoff(prec)
    return PrecisionReal(rounded, radius, prec)


def _closed_form_mpf(Q: QSecondKind, x: mpf, prec: int) -> PrecisionReal:
    # Cancellation between the two parts costs about D·log2|x| bits.
    guard = GUARD_BITS + 2 * Q.decay_order * max(1, int(mp.log(abs(x) + 2, 2)) + 1)
    with mp.workprec(prec + guard):
        log_part = Q.P.evaluate_mpf(x) * mp.log(abs((x + 1) / (x - 1)))
        rational = Q.R.evaluate_mpf(x) / ((x - 1) ** Q.alpha * (x + 1) ** Q.beta)
        value = log_part + rational
        spread = (abs(log_part) + abs(rational)) * (Q.R.degree + Q.d + 8)
        err = spread * unit_roundoff(prec + guard)
    return _rounded(value, err, prec)


@dataclass(frozen=True)
class _FarFieldSeries:
    """Σ h_j z^j with h_j the ₂F₁(a, b; c; ·) coefficients, h_0 = 1."""

    a: int
    b: int
    c: int
    coefficients: list = field(default_factory=list, compare=False)

    @property
    def monotone_from(self) -> int:
        # h_{j+1}/h_j ≤ 1 for every j from this index on
        excess = self.a * self.b - self.c
        slack = self.c + 1 - self.a - self.b
        return max(0, -(-excess // slack)) if excess > 0 else 0

    def _extend(self, count: int, prec: int) -> list:
        # every stored coefficient shares the precision of the first one
        coeffs = self.coefficients
        if coeffs and coeffs[0][1] < prec:
            coeffs.clear()
        if coeffs:
            prec = coeffs[0][1]
        with mp.workprec(prec):
            if not coeffs:
                coeffs.append((mpf(1), prec))
            while len(coeffs) < count:
                j = len(coeffs) - 1
                h = coeffs[-1][0] * (self.a + j) * (self.b + j) / ((self.c + j) * (j + 1))
                coeffs.append((h, prec))
        return coeffs

    def evaluate(self, z: mpf, prec: int) -> tuple[mpf, mpf]:
        """Sum and an error bound (rounding plus proven remainder)."""
        start = self.monotone_from
        coeffs = self._extend(start + 8, prec)
        with mp.workprec(prec):
            total, power, j = mpf(0), mpf(1), 0
            tol = unit_roundoff(prec)
            while True:
                if j >= len(coeffs):
                    coeffs = self._extend(2 * len(coeffs), prec)
                term = coeffs[j][0] * power
                total += term
                j += 1
                power *= z
                if j > start and abs(term) <= tol * abs(total):
                    break
            if j >= len(coeffs):
                coeffs = self._extend(j + 1, prec)
            remainder = abs(coeffs[j][0] * power) / (1 - abs(z))
            err = remainder + abs(total) * (j + 2) * tol
        return total, err


@lru_cache(maxsize=None)
def _far_field_series(a: int, b: int, c: int) -> _FarFieldSeries:
    return _FarFieldSeries(a, b, c)


def _far_field_mpf(Q: QSecondKind, x: mpf, prec: int) -> PrecisionReal:
    """Cancellation-free evaluation for |x| ≥ FAR_FIELD via the ₂F₁ series."""
    d, alpha, beta = Q.d, Q.alpha, Q.beta
    work = prec + 8
    with mp.workprec(work):
        if x > 0:
            y, first, second, sign = x, alpha, beta, 1
        else:
            # Q^{(α,β)}(x) = (-1)^{α+β+d+1} Q^{(β,α)}(-x)
            y, first, second, sign = -x, beta, alpha, (-1) ** (d + 1)
        series = _far_field_series(d + second + 1, d + 1, 2 * d + alpha + beta + 2)
        z = 2 / (1 + y)
        total, err = series.evaluate(z, work)
        prefactor = to_mpf(Q.asymptotic_constant, work) / (
            (y - 1) ** first * (y + 1) ** (d + second + 1)
        )
        value = sign * prefactor * total
        err = abs(prefactor) * err + abs(value) * (d + alpha + beta + 4) * unit_roundoff(work)
    return _rounded(value, err, prec)


def q_eval_real(Q: QSecondKind, x, prec: int) -> PrecisionReal:
    """Numerical Q(x) for real x ≠ ±1."""
    if isinstance(x, (int, Fraction)):
        if Fraction(x) in (1, -1):
            raise SingularArgumentError(f"Q is singular at x = {x}")
        if abs(Fraction(x)) < FAR_FIELD:
            ball = q_eval_at(Q, x).to_real(prec + GUARD_BITS + 2 * Q.decay_order)
            with mp.workprec(prec):
                value = +ball.value
            return PrecisionReal(
                value, ball.error_radius + abs(value) * unit_roundoff(prec), prec
            )
    xv = _as_mpf(x, prec + GUARD_BITS)
    if xv in (1, -1):
        raise SingularArgumentError(f"Q is singular at x = {x}")
    if abs(xv) >= FAR_FIELD:
        return _far_field_mpf(Q, xv, prec)
    return _closed_form_mpf(Q, xv, prec)


def q_eval_hypergeometric(Q: QSecondKind, x, prec: int) -> PrecisionReal:
    """Q via its ₂F₁ representation; on the cut the boundary values are averaged."""
    d, alpha, beta = Q.d, Q.alpha, Q.beta
    values = []
    for extra in (GUARD_BITS, 3 * GUARD_BITS):
        with mp.workprec(prec + extra):
            xv = _as_mpf(x, prec + extra)
            if xv in (1, -1):
                raise SingularArgumentError(f"Q is singular at x = {x}")
            t = 2 / (1 + xv)
            f = mp.hyp2f1(d + beta + 1, d + 1, 2 * d + alpha + beta + 2, t)
            # Conjugate boundary values average to the real part.
            f = mp.re(f)
            pre = to_mpf(Q.asymptotic_constant, prec + extra) / (
                (xv - 1) ** alpha * (xv + 1) ** (d + beta + 1)
            )
            values.append(pre * f)
    with mp.workprec(prec):
        value = +values[0]
        err = abs(values[0] - values[1]) + abs(value) * unit_roundoff(prec)
    return PrecisionReal(value, err, prec)


def q_quadrature(Q: QSecondKind, x, prec: int) -> PrecisionReal:
    """Q from its integral representation; principal value inside (-1, 1)."""
    d, alpha, beta = Q.d, Q.alpha, Q.beta
    work = prec + GUARD_BITS
    with mp.workprec(work):
        xv = _as_mpf(x, work)
        if abs(xv) == 1:
            raise SingularArgumentError(f"Q is singular at x = {x}")
        if abs(xv) > 1:
            integral, err = mp.quad(
                lambda t: (1 - t) ** (d + alpha) * (1 + t) ** (d + beta) / (xv - t) ** (d + 1),
                [-1, 1],
                error=True,
            )
            scale = 1 / ((xv - 1) ** alpha * (xv + 1) ** beta * 2 ** (d + 1))
        else:
            jac = jacobi_polynomial(d, alpha, beta)

            def weight(t):
                return (1 - t) ** alpha * (1 + t) ** beta * jac.evaluate_mpf(t)

            gx = weight(xv)
            regular, err = mp.quad(lambda t: (weight(t) - gx) / (xv - t), [-1, xv, 1], error=True)
            integral = regular + gx * mp.log((1 + xv) / (1 - xv))
            scale = 1 / ((xv - 1) ** alpha * (xv + 1) ** beta * 2)
        value = scale * integral
        err = abs(scale) * err
    return _rounded(value, err, prec)


class QKernel:
    """Per-term evaluator of Q((n2-n1)/n) used by the convolution sums.

    Near the diagonal (|x| < FAR_FIELD) terms are exact LogLinearValues rounded
    once; elsewhere the ₂F₁ series is used, whose terms share one sign.
    """

    def __init__(self, Q: QSecondKind, prec: int):
        self.Q = Q
        self.prec = prec
        self.work = prec + 8
        d, alpha, beta = Q.d, Q.alpha, Q.beta
        top = 2 * d + alpha + beta + 2
        self._series = {
            1: _FarFieldSeries(d + beta + 1, d + 1, top),
            -1: _FarFieldSeries(d + alpha + 1, d + 1, top),
        }
        self._C = to_mpf(Q.asymptotic_constant, self.work)

    def __getstate__(self):
        return {"Q": self.Q, "prec": self.prec}

    def __setstate__(self, state):
        self.__init__(state["Q"], state["prec"])

    def term(self, n1: int, n2: int) -> tuple[mpf, mpf]:
        """Q value at (n1, n2) and an absolute error bound, at working precision."""
        n = n1 + n2
        t = n2 - n1
        Q = self.Q
        if abs(t) < FAR_FIELD * abs(n):
            ball = q_eval_exact(Q, n1, n2).to_real(self.work + 2 * Q.decay_order)
            return ball.value, ball.error_radius + abs(ball.value) * unit_roundoff(self.work)
        d = Q.d
        with mp.workprec(self.work):
            if (t > 0) == (n > 0):
                series, first, second, near, far, sign = (
                    self._series[1], Q.alpha, Q.beta, n1, n2, 1)
            else:
                series, first, second, near, far, sign = (
                    self._series[-1], Q.beta, Q.alpha, n2, n1, (-1) ** (d + 1))
            z = mpf(n) / far
            total, err = series.evaluate(z, self.work)
            # (y-1) = -2·near/n, (y+1) = 2·far/n in the oriented variable y
            pre = self._C * (mpf(n) / (-2 * near)) ** first * (mpf(n) / (2 * far)) ** (
                d + second + 1
            )
            value = sign * pre * total
            err = abs(pre) * err + abs(value) * (d + first + second + 6) * unit_roundoff(
                self.work
            )
        return value, err
