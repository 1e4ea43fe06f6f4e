"""Divisor functions and the left-hand side of the convolution identity.

The sum runs over n1 + n2 = n, n1·n2 ≠ 0, cut at max(|n1|, |n2|) ≤ N.  Work is
split into fixed blocks of n1 so the reduction order, and hence every bit of the
result, does not depend on how many worker processes are used.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy
from mpmath import mp, mpf

from divisum.arith import GUARD_BITS, PrecisionReal, to_mpf, unit_roundoff
from divisum.exceptions import DomainError, ExtrapolationError, TailBoundError
from divisum.jacobi import QKernel, QSecondKind, q_construct

logger = logging.getLogger(__name__)

BLOCK_SIZE = 4096
# Largest m kept in a SigmaSieve table
MAX_SIEVE_LIMIT = 1 << 22
# σ_0(m) ≤ K·m^{1/4}
DIVISOR_EXPONENT = mpf(1) / 4


@dataclass(frozen=True)
class ConvolutionParams:
    d: int
    r1: int
    r2: int
    n: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        for name in ("r1", "r2"):
            r = getattr(self, name)
            if not isinstance(r, int) or r < 0 or r % 2:
                raise DomainError(f"{name} must be a nonnegative even integer, got {r!r}")
        if not isinstance(self.n, int) or self.n == 0:
            raise DomainError(f"n must be a nonzero integer, got {self.n!r}")

    @property
    def k(self) -> int:
        return 2 * self.d + self.r1 + self.r2 + 2

    @property
    def q(self) -> QSecondKind:
        return q_construct(self.d, self.r1, self.r2)

    @property
    def zero_exponents(self) -> int:
        return (self.r1 == 0) + (self.r2 == 0)

    def swapped(self) -> ConvolutionParams:
        return ConvolutionParams(self.d, self.r2, self.r1, self.n)

    def with_n(self, n: int) -> ConvolutionParams:
        return ConvolutionParams(self.d, self.r1, self.r2, n)


@dataclass
class TailEstimate:
    partial_sums: list[tuple[int, PrecisionReal]]
    extrapolated: PrecisionReal | None
    error_estimate: mpf
    rigorous: bool
    leading_coefficient: mpf | None = None
    failure: str | None = None

    def __post_init__(self):
        Ns = [N for N, _ in self.partial_sums]
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise DomainError(f"partial sums must have increasing N, got {Ns}")
        if self.error_estimate < 0:
            raise DomainError("error_estimate must be nonnegative")


# Divisor functions


def sigma(r: int, n: int) -> int:
    """σ_r(|n|)."""
    if n == 0:
        raise DomainError("σ_r(0) is undefined")
    if r < 0:
        raise DomainError(f"r must be nonnegative, got {r}")
    return int(sympy.divisor_sigma(abs(n), r))


class SigmaSieve:
    """σ_r(m) for 1 ≤ m ≤ limit, grown on demand.

    The table never grows past MAX_SIEVE_LIMIT entries; larger m are computed
    by factorization and not stored.
    """

    def __init__(self, r: int, limit: int = 0):
        if r < 0:
            raise DomainError(f"r must be nonnegative, got {r}")
        self.r = r
        self._values: list[int] = [0]
        self.extend(limit)

    @property
    def limit(self) -> int:
        return len(self._values) - 1

    def extend(self, limit: int) -> None:
        limit = min(limit, MAX_SIEVE_LIMIT)
        if limit <= self.limit:
            return
        values = [0] * (limit + 1)
        for m in range(1, limit + 1):
            power = m**self.r
            for multiple in range(m, limit + 1, m):
                values[multiple] += power
        self._values = values
        logger.debug("sigma_%d sieve extended to %d", self.r, limit)

    def __getitem__(self, m: int) -> int:
        m = abs(m)
        if m == 0:
            raise DomainError("σ_r(0) is undefined")
        if m > self.limit:
            self.extend(max(m, 2 * self.limit))
        if m > self.limit:
            return sigma(self.r, m)
        return self._values[m]


@lru_cache(maxsize=8)
def _shared_sieve(r: int) -> SigmaSieve:
    return SigmaSieve(r)


# Partial sums


def _n1_range(n: int, N: int) -> tuple[int, int]:
    """Inclusive n1 range with max(|n1|, |n - n1|) ≤ N."""
    return max(-N, n - N), min(N, n + N)


def _shell_blocks(n: int, N_prev: int, N: int) -> list[tuple[int, int]]:
    """Half-open n1 blocks covering the pairs added between N_prev and N."""
    lo, hi = _n1_range(n, N)
    if N_prev <= 0:
        spans = [(lo, hi + 1)]
    else:
        plo, phi = _n1_range(n, N_prev)
        spans = [(lo, plo), (phi + 1, hi + 1)]
    blocks = []
    for start, stop in spans:
        for a in range(start, stop, BLOCK_SIZE):
            blocks.append((a, min(a + BLOCK_SIZE, stop)))
    return blocks


def _block_sum(
    kernel: QKernel, n: int, start: int, s1: list[int], s2: list[int]
) -> tuple[mpf, mpf]:
    """Sum of Q·σσ over n1 in [start, start + len(s1)); zeros mark skipped n1."""
    with mp.workprec(kernel.work):
        terms, err = [], mpf(0)
        for offset, (a, b) in enumerate(zip(s1, s2)):
            if a == 0 or b == 0:
                continue
            n1 = start + offset
            value, value_err = kernel.term(n1, n - n1)
            weight = a * b
            terms.append(value * weight)
            err += value_err * weight
        if not terms:
            return mpf(0), mpf(0)
        total = mp.fsum(terms)
        spread = mp.fsum(abs(t) for t in terms)
        err += spread * (len(terms) + 2) * unit_roundoff(kernel.work)
    return total, err


def _tree_sum(parts: list[tuple[mpf, mpf]], prec: int) -> tuple[mpf, mpf]:
    if not parts:
        return mpf(0), mpf(0)
    with mp.workprec(prec):
        while len(parts) > 1:
            merged = []
            for i in range(0, len(parts) - 1, 2):
                (a, ea), (b, eb) = parts[i], parts[i + 1]
                total = a + b
                merged.append((total, ea + eb + abs(total) * unit_roundoff(prec)))
            if len(parts) % 2:
                merged.append(parts[-1])
            parts = merged
    return parts[0]


def _sum_blocks(
    p: ConvolutionParams,
    kernel: QKernel,
    blocks: list[tuple[int, int]],
    jobs: int,
) -> tuple[mpf, mpf]:
    sieve1, sieve2 = _shared_sieve(p.r1), _shared_sieve(p.r2)
    n = p.n
    reach = max((max(abs(a), abs(b - 1)) for a, b in blocks), default=0) + abs(n)
    sieve1.extend(reach)
    sieve2.extend(reach)
    starts, s1s, s2s = [], [], []
    for start, stop in blocks:
        starts.append(start)
        s1s.append([sieve1[m] if m not in (0, n) else 0 for m in range(start, stop)])
        s2s.append([sieve2[n - m] if m not in (0, n) else 0 for m in range(start, stop)])
    args = ([kernel] * len(blocks), [n] * len(blocks), starts, s1s, s2s)
    if jobs > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            parts = list(executor.map(_block_sum, *args))
    else:
        parts = list(map(_block_sum, *args))
    return _tree_sum(parts, kernel.work)


def _to_ball(total: mpf, err: mpf, prec: int) -> PrecisionReal:
    with mp.workprec(prec):
        value = +total
    return PrecisionReal(value, err + abs(value) * unit_roundoff(prec), prec)


def lhs_partial(p: ConvolutionParams, N: int, prec: int, jobs: int = 1) -> PrecisionReal:
    """Truncated left-hand side Σ Q((n2-n1)/n)·σ_{r1}(n1)·σ_{r2}(n2)."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    kernel = QKernel(p.q, prec)
    total, err = _sum_blocks(p, kernel, _shell_blocks(p.n, 0, N), jobs)
    return _to_ball(total, err, prec)


def lhs_partials(
    p: ConvolutionParams, Ns: list[int], prec: int, jobs: int = 1
) -> list[tuple[int, PrecisionReal]]:
    """Partial sums at increasing N, each shell evaluated once."""
    kernel = QKernel(p.q, prec)
    results = []
    running, running_err, previous = mpf(0), mpf(0), 0
    for N in Ns:
        if N <= previous:
            raise DomainError(f"truncation points must increase, got {Ns}")
        shell, shell_err = _sum_blocks(p, kernel, _shell_blocks(p.n, previous, N), jobs)
        with mp.workprec(kernel.work):
            running = running + shell
            running_err += shell_err + abs(running) * unit_roundoff(kernel.work)
        results.append((N, _to_ball(running, running_err, prec)))
        logger.info("d=%d r=(%d,%d) n=%d N=%d done", p.d, p.r1, p.r2, p.n, N)
        previous = N
    return results


# Tail control


@lru_cache(maxsize=None)
def divisor_bound_constant() -> mpf:
    """K with σ_0(m) ≤ K·m^{1/4} for all m ≥ 1."""
    with mp.workprec(64):
        K = mpf(1)
        for prime in sympy.primerange(2, 16):
            K *= max(mpf(a + 1) / mpf(prime) ** (a * DIVISOR_EXPONENT) for a in range(65))
    return K


def tail_bound(p: ConvolutionParams, N: int) -> tuple[mpf, bool]:
    """Bound on Σ |terms| with max(|n1|, |n2|) > N, and whether it is proven.

    Uses |Q(x)| ≤ C·(|x|-1)^{-D} and σ_r(m) ≤ ζ(r)·m^r; for r = 0 the
    divisor bound σ_0(m) ≤ K·m^{1/4} is used and the result is flagged.
    """
    a = abs(p.n)
    if N <= 2 * a:
        raise TailBoundError(f"tail bound needs N > 2|n| = {2 * a}, got {N}")
    Q = p.q
    D = Q.decay_order
    with mp.workprec(64):
        scale = 4 * to_mpf(Q.asymptotic_constant, 64) * (mpf(a) / 2) ** D
        exponent = mpf(0)
        for r in (p.r1, p.r2):
            if r == 0:
                scale *= divisor_bound_constant()
                exponent += DIVISOR_EXPONENT
            else:
                scale *= mp.zeta(r)
                exponent += r
        ratio = mpf(N + 1) / (N + 1 - a)
        g = D - exponent - 1
        bound = scale * ratio**exponent * mpf(N - a) ** (-g) / g
    return bound, p.zero_exponents == 0


def tail_asymptotic(p: ConvolutionParams, N: int) -> mpf:
    """Leading-order tail S(∞) - S(N) for r1, r2 ≥ 2 (heuristic, not a bound)."""
    if p.zero_exponents:
        raise DomainError("the leading tail term is only available for r1, r2 >= 2")
    d, r1, r2 = p.d, p.r1, p.r2
    if d % 2 == 0:
        return mpf(0)
    s = r1 + r2 + 1
    with mp.workprec(64):
        head = mpf(math.factorial(d + r1) * math.factorial(d + r2)) / (
            d * math.factorial(2 * d + r1 + r2 + 1)
        )
        zetas = mp.zeta(r1 + 1) * mp.zeta(r2 + 1) / mp.zeta(r1 + r2 + 2)
        return head * zetas * sigma(s, p.n) * mpf(abs(p.n)) ** d / mpf(N) ** d


# Extrapolation


@dataclass(frozen=True)
class _Fit:
    limit: mpf
    coefficients: list = field(default_factory=list)
    weights: list = field(default_factory=list)


def _basis(d: int, log_power: int, count: int) -> list[tuple[int, int]]:
    """(j, p) exponents of h^j·ℓ^p in fitting order."""
    out, j = [], d
    while len(out) < count:
        for p in range(log_power, -1, -1):
            out.append((j, p))
        j += 1
    return out[:count]


def _fit(Ns: list[int], values: list[mpf], d: int, count: int, log_power: int) -> _Fit:
    if count == 0:
        return _Fit(values[-1], [], [mpf(0)] * (len(values) - 1) + [mpf(1)])
    base = Ns[0]
    basis = _basis(d, log_power, count)
    A = mp.matrix(len(Ns), count + 1)
    for i, N in enumerate(Ns):
        h = mpf(base) / N
        ell = mp.log(mpf(N) / base)
        A[i, 0] = 1
        for c, (j, p) in enumerate(basis, start=1):
            A[i, c] = -(h**j) * ell**p
    try:
        pinv = mp.inverse(A.T * A) * A.T
    except ZeroDivisionError as exc:
        raise ExtrapolationError("extrapolation fit matrix is singular") from exc
    b = mp.matrix(values)
    x = pinv * b
    if not all(mp.isfinite(x[i]) for i in range(count + 1)):
        raise ExtrapolationError("extrapolation fit produced non-finite coefficients")
    weights = [pinv[0, i] for i in range(len(Ns))]
    return _Fit(x[0], [x[i] for i in range(1, count + 1)], weights)


def _as_ball(v, prec: int) -> PrecisionReal:
    if isinstance(v, PrecisionReal):
        return v
    if isinstance(v, (int, Fraction)):
        return PrecisionReal.exact(v, prec)
    return PrecisionReal(v if isinstance(v, mpf) else mpf(v), mpf(0), prec)


def extrapolate_limit(
    Ns: list[int],
    values: list[PrecisionReal] | list[mpf],
    d: int,
    terms: int,
    log_power: int = 0,
    prec: int | None = None,
) -> tuple[PrecisionReal, mpf | None]:
    """Least-squares limit of S(N) = S∞ - Σ c·h^j·ℓ^p with h = N0/N, ℓ = log(N/N0).

    Returns the limit (radius = model change from dropping the last basis
    function plus propagated rounding) and the fitted N^{-d} coefficient.
    """
    if len(Ns) != len(values):
        raise DomainError("Ns and values must have the same length")
    if terms < 1 or len(Ns) < terms + 1:
        raise DomainError(f"need at least terms + 1 = {terms + 1} levels, got {len(Ns)}")
    balls = [_as_ball(v, prec or mp.prec) for v in values]
    prec = prec or min(b.precision_bits for b in balls)
    work = prec + GUARD_BITS
    with mp.workprec(work):
        mids = [b.value for b in balls]
        full = _fit(Ns, mids, d, terms, log_power)
        reduced = _fit(Ns, mids, d, terms - 1, log_power)
        rounding = sum(abs(w) * b.error_radius for w, b in zip(full.weights, balls))
        model = abs(full.limit - reduced.limit)
        leading = None
        if full.coefficients and _basis(d, log_power, 1)[0][1] == 0:
            leading = full.coefficients[0] * mpf(Ns[0]) ** d
        err = model + rounding + abs(full.limit) * unit_roundoff(prec)
    with mp.workprec(prec):
        limit = +full.limit
    return PrecisionReal(limit, err, prec), leading


def lhs_extrapolated(
    p: ConvolutionParams,
    base_N: int,
    levels: int,
    terms: int,
    prec: int,
    jobs: int = 1,
) -> TailEstimate:
    """Partial sums at base_N·2^i and their extrapolated limit.

    When the proven tail bound at the last level is tighter than the
    extrapolation's own error, the last partial sum is reported with that bound
    instead and the estimate is marked rigorous.
    """
    if levels < terms + 1:
        raise DomainError(f"levels ({levels}) must be at least terms + 1 ({terms + 1})")
    Ns = [base_N * 2**i for i in range(levels)]
    partials = lhs_partials(p, Ns, prec, jobs)
    try:
        limit, leading = extrapolate_limit(
            Ns, [s for _, s in partials], p.d, terms, p.zero_exponents, prec
        )
    except ExtrapolationError as exc:
        logger.warning("extrapolation failed for %s: %s", p, exc)
        exc.partials = partials
        return TailEstimate(partials, None, mpf(0), False, failure=str(exc))
    estimate = TailEstimate(partials, limit, limit.error_radius, False, leading)
    if Ns[-1] > 2 * abs(p.n):
        bound, proven = tail_bound(p, Ns[-1])
        last = partials[-1][1]
        if proven and bound + last.error_radius < limit.error_radius:
            radius = bound + last.error_radius
            estimate.extrapolated = PrecisionReal(last.value, radius, last.precision_bits)
            estimate.error_estimate = radius
            estimate.rigorous = True
    return estimate
