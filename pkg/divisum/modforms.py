"""Level-1 modular forms as truncated q-expansions.

Exact arithmetic (Fraction) is used up to the Victor Miller basis; Hecke
eigenforms are then produced numerically by diagonalizing T_2 on that basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy
from mpmath import mp, mpf

from divisum.arith import PrecisionReal, bernoulli, unit_roundoff
from divisum.exceptions import DomainError, PrecisionError
from divisum.sums import SigmaSieve

logger = logging.getLogger(__name__)

DEFAULT_TERMS = 32


@dataclass(frozen=True)
class QExpansion:
    """Σ_{m < M} coeffs[m]·q^m of a modular form of the given weight."""

    weight: int
    coeffs: tuple

    def __post_init__(self):
        if self.weight < 0 or self.weight % 2:
            raise DomainError(f"weight must be a nonnegative even integer, got {self.weight}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def M(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, m: int):
        return self.coeffs[m]

    def is_cusp(self) -> bool:
        return self.M > 0 and self.coeffs[0] == 0

    def truncate(self, M: int) -> QExpansion:
        return QExpansion(self.weight, self.coeffs[:M])

    def _check_weight(self, other: QExpansion) -> None:
        if other.weight != self.weight:
            raise DomainError(f"weights differ: {self.weight} and {other.weight}")

    def __add__(self, other: QExpansion) -> QExpansion:
        self._check_weight(other)
        return QExpansion(self.weight, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: QExpansion) -> QExpansion:
        self._check_weight(other)
        return QExpansion(self.weight, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other) -> QExpansion:
        if not isinstance(other, QExpansion):
            return QExpansion(self.weight, tuple(c * other for c in self.coeffs))
        M = min(self.M, other.M)
        out = [0] * M
        for i, a in enumerate(self.coeffs[:M]):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs[: M - i]):
                out[i + j] += a * b
        return QExpansion(self.weight + other.weight, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> QExpansion:
        result = QExpansion(0, (Fraction(1),) + (Fraction(0),) * (self.M - 1))
        for _ in range(exponent):
            result = result * self
        return result

    def hecke_tp(self, p: int) -> QExpansion:
        """T_p f with a_n(T_p f) = a_{np} + p^{k-1}·a_{n/p}."""
        if not sympy.isprime(p):
            raise DomainError(f"p must be prime, got {p}")
        scale = p ** (self.weight - 1)
        count = (self.M - 1) // p + 1
        out = []
        for n in range(count):
            value = self.coeffs[n * p]
            if n % p == 0:
                value = value + scale * self.coeffs[n // p]
            out.append(value)
        return QExpansion(self.weight, tuple(out))


def eisenstein_q(k: int, M: int) -> QExpansion:
    """E_k = 1 - (2k/B_k)·Σ σ_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise DomainError(f"Eisenstein weight must be even and >= 4, got {k}")
    scale = Fraction(-2 * k) / bernoulli(k)
    sieve = SigmaSieve(k - 1, M)
    coeffs = [Fraction(1)] + [scale * sieve[m] for m in range(1, M)]
    return QExpansion(k, tuple(coeffs[:M]))


def delta_q(M: int) -> QExpansion:
    """Δ = (E_4³ - E_6²)/1728."""
    if M < 1:
        raise DomainError(f"M must be positive, got {M}")
    e4, e6 = eisenstein_q(4, M), eisenstein_q(6, M)
    return (e4**3 - e6**2) * Fraction(1, 1728)


def delta_product_q(M: int) -> QExpansion:
    """Δ = q·Π(1 - q^n)^24, via Euler's pentagonal series."""
    euler = [Fraction(0)] * M
    j = 0
    while True:
        hits = False
        for g in {j * (3 * j - 1) // 2, j * (3 * j + 1) // 2}:
            if g < M:
                euler[g] += (-1) ** j
                hits = True
        if not hits:
            break
        j += 1
    series = QExpansion(0, tuple(euler)) ** 24
    return QExpansion(12, (Fraction(0),) + series.coeffs[: M - 1])


def dim_cusp(k: int) -> int:
    """dim S_k(SL_2(Z))."""
    if k < 0 or k % 2:
        raise DomainError(f"weight must be a nonnegative even integer, got {k}")
    if k < 4:
        return 0
    full = k // 12 + (0 if k % 12 == 2 else 1)
    return full - 1


def _eisenstein_monomial(w: int, M: int) -> QExpansion:
    if w == 0:
        return QExpansion(0, (Fraction(1),) + (Fraction(0),) * (M - 1))
    if w % 4 == 0:
        return eisenstein_q(4, M) ** (w // 4)
    return eisenstein_q(6, M) * eisenstein_q(4, M) ** ((w - 6) // 4)


@lru_cache(maxsize=None)
def victor_miller_basis(k: int, M: int) -> tuple[QExpansion, ...]:
    """Echelonized integral basis f_1..f_D of S_k with a_i(f_j) = δ_ij."""
    dim = dim_cusp(k)
    if dim == 0:
        return ()
    if M <= dim:
        raise DomainError(f"need more than {dim} terms for weight {k}, got {M}")
    delta = delta_q(M)
    forms = [delta**j * _eisenstein_monomial(k - 12 * j, M) for j in range(1, dim + 1)]
    for j in range(dim - 1, -1, -1):
        for i in range(j):
            factor = forms[i][j + 1]
            if factor:
                forms[i] = forms[i] - forms[j] * factor
    return tuple(forms)


def hecke_matrix(k: int, M: int, p: int = 2) -> list[list[Fraction]]:
    """Matrix of T_p on the Victor Miller basis: entry [i][j] = a_{i+1}(T_p f_{j+1})."""
    basis = victor_miller_basis(k, M)
    dim = len(basis)
    if M <= p * dim:
        raise DomainError(f"T_{p} on weight {k} needs more than {p * dim} terms, got {M}")
    images = [f.hecke_tp(p) for f in basis]
    return [[Fraction(images[j][i + 1]) for j in range(dim)] for i in range(dim)]


@dataclass(frozen=True)
class Eigenform:
    """Normalized Hecke eigenform; coeffs[0] = 0 and coeffs[1] = 1."""

    weight: int
    coeffs: tuple[PrecisionReal, ...]
    conjugacy_tag: int
    precision_bits: int

    @property
    def M(self) -> int:
        return len(self.coeffs)

    def a(self, m: int) -> PrecisionReal:
        if m >= self.M:
            raise DomainError(f"coefficient a_{m} not available (M = {self.M})")
        return self.coeffs[m]

    def values(self) -> list[mpf]:
        return [c.value for c in self.coeffs]

    def truncate(self, M: int) -> Eigenform:
        return Eigenform(self.weight, self.coeffs[:M], self.conjugacy_tag, self.precision_bits)


def _eigenvalues(matrix: list[list[Fraction]], work: int) -> list[mpf]:
    dim = len(matrix)
    if dim == 1:
        value = matrix[0][0]
        return [mpf(value.numerator) / value.denominator]
    x = sympy.Symbol("x")
    charpoly = sympy.Matrix(matrix).charpoly(x).all_coeffs()
    coeffs = [mpf(int(c.p)) / int(c.q) for c in charpoly]
    try:
        roots = mp.polyroots(coeffs, maxsteps=400, extraprec=work)
    except mp.NoConvergence as exc:
        raise PrecisionError(f"T_2 eigenvalues did not converge: {exc}") from exc
    out = []
    for root in roots:
        if abs(mp.im(root)) > mpf(2) ** (-work // 2) * (1 + abs(root)):
            raise PrecisionError(f"T_2 eigenvalue {root} is not real")
        out.append(mp.re(root))
    return sorted(out)


def _eigenvector(matrix: list[list[Fraction]], value: mpf, work: int) -> list[mpf]:
    dim = len(matrix)
    A = mp.matrix([[mpf(c.numerator) / c.denominator for c in row] for row in matrix])
    # offset of 2^{-work/2} keeps the LU pivots above mpmath's singularity threshold
    shift = value + mpf(2) ** (-work // 2) * (1 + abs(value))
    B = A - shift * mp.eye(dim)
    v = mp.matrix([1] * dim)
    try:
        for _ in range(4):
            v = mp.lu_solve(B, v)
            v = v / v[0]
    except ZeroDivisionError as exc:
        raise PrecisionError(f"inverse iteration at {value} failed: {exc}") from exc
    return [v[i] for i in range(dim)]


def hecke_eigenforms(k: int, M: int, prec: int) -> list[Eigenform]:
    """Normalized eigenforms of weight k to M terms, sorted by a_2."""
    basis = victor_miller_basis(k, M) if dim_cusp(k) else ()
    if not basis:
        return []
    matrix = hecke_matrix(k, M)
    work = 2 * prec
    forms = []
    with mp.workprec(work):
        values = _eigenvalues(matrix, work)
        gaps = [b - a for a, b in zip(values, values[1:])]
        if gaps and min(gaps) < mpf(2) ** (-prec // 2) * (1 + max(abs(v) for v in values)):
            raise PrecisionError(f"T_2 eigenvalues of weight {k} are not separated at {prec} bits")
        for tag, value in enumerate(values):
            vector = _eigenvector(matrix, value, work)
            coeffs = [PrecisionReal.exact(0, prec)]
            for m in range(1, M):
                terms = [c * int(f[m]) for c, f in zip(vector, basis)]
                total = mp.fsum(terms)
                spread = mp.fsum(abs(t) for t in terms)
                with mp.workprec(prec):
                    mid = +total
                err = spread * mpf(2) ** (-work + 16) + abs(mid) * unit_roundoff(prec)
                coeffs.append(PrecisionReal(mid, err, prec))
            forms.append(Eigenform(k, tuple(coeffs), tag, prec))
    logger.debug("weight %d: %d eigenforms with M = %d", k, len(forms), M)
    return forms


def required_terms(prec: int, weight: int, y_min=None) -> int:
    """Smallest M ≥ DEFAULT_TERMS with M^{k/2}·e^{-2π·M·y_min} < 2^{-prec-10}."""
    with mp.workprec(64):
        y = mpf(y_min) if y_min is not None else mp.sqrt(3) / 2
        target = (prec + 10) * mp.ln2
        M = DEFAULT_TERMS
        while 2 * mp.pi * M * y - (mpf(weight) / 2) * mp.log(M) < target:
            M += 1
    return M


def coefficient_count(prec: int, weight: int, n_max: int = 1) -> int:
    """Terms needed for L-values and Petersson norms plus a_1..a_{n_max}."""
    return max(required_terms(prec, weight), n_max + 1, 2 * dim_cusp(weight) + 1)


def tau(m: int) -> int:
    """Ramanujan τ(m) from the exact Δ expansion."""
    if m < 1:
        raise DomainError(f"τ is defined for m >= 1, got {m}")
    return int(delta_q(m + 1)[m])


def hecke_residual(f: Eigenform, p: int, r: int) -> PrecisionReal:
    """a_{p^{r+1}} - (a_p·a_{p^r} - p^{k-1}·a_{p^{r-1}})."""
    lhs = f.a(p ** (r + 1))
    rhs = f.a(p) * f.a(p**r) - f.a(p ** (r - 1)) * (p ** (f.weight - 1))
    return lhs - rhs
