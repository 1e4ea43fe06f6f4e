"""Printed convolution identities, kept as test vectors.

Each entry holds a weighting, the printed right-hand side (σ_r(n) as the symbols
sigma_r, zp(m) for ζ'(-m)) and, where printed, the cusp coefficients as
multiples of L(f, s_num)/L(f, s_den). The Γ-factor is never stored: it is derived
from the weighting.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from divisum.boundary import N_SYMBOL, sigma_symbol, zeta_prime_neg_even_symbolic
from divisum.exceptions import DomainError


@dataclass(frozen=True)
class PrintedCusp:
    """Γ·λ_f = coefficient·L(f, s_num)/L(f, s_den) for the eigenform with the given a_2."""

    s_num: int
    s_den: int
    coefficient: str
    a2: str | None = None


@dataclass(frozen=True)
class PrintedIdentity:
    name: str
    d: int
    r1: int
    r2: int
    weighting: str
    rhs: str
    cusp: tuple[PrintedCusp, ...] = ()
    default_n: tuple[int, int] = (1, 10)

    def rhs_expression(self) -> sympy.Expr:
        names = {
            "n": N_SYMBOL,
            "zp": zeta_prime_neg_even_symbolic,
            **{f"sigma_{r}": sigma_symbol(r) for r in {0, self.r1, self.r2}},
        }
        return sympy.sympify(self.rhs, locals=names)


_PSI_TILDE = (
    "({a}**5/{b}**2 + 35*{a}**4/{b} - 1099*{a}**3 + 1575*{a}**2*{b}"
    " + (420*{a}**3 - 2100*{a}**2*{b})*({La} - {Lb}))/({a} + {b})**3"
)

_PSI = "({} + {})/2".format(
    _PSI_TILDE.format(a="n1", b="n2", La="L1", Lb="L2"),
    _PSI_TILDE.format(a="n2", b="n1", La="L2", Lb="L1"),
)

_PSI2 = (
    "7106*n1**7/n**7 - 22287*n1**6/n**6 + 84626*n1**5/(3*n**5)"
    " - 110789*n1**4/(6*n**4) + 33286*n1**3/(5*n**3) - 3893*n1**2/(3*n**2)"
    " + 2614*n1/(21*n) - 1727/420 + n/(63*n1) + n**2/(8190*n1**2)"
    " - 22*n/(63*n2) - 11*n**2/(1365*n2**2) - n**3/(4095*n2**3)"
    " - n**4/(180180*n2**4)"
    " - (11*n1**8 - 176*n1**7*n2 + 924*n1**6*n2**2 - 2112*n1**5*n2**3"
    " + 2310*n1**4*n2**4 - 1232*n1**3*n2**5 + 308*n1**2*n2**6 - 32*n1*n2**7"
    " + n2**8)/n**8*(L1 - L2)"
)

IDENTITIES: dict[str, PrintedIdentity] = {
    "conjecture": PrintedIdentity(
        name="conjecture",
        d=1,
        r1=2,
        r2=2,
        weighting=(
            "-n1**2/(4*n2**2) - 7*n1/(2*n2) - n2**2/(4*n1**2) - 7*n2/(2*n1) + 47/2"
            " + (15 - 30*n1/(n1 + n2))*(L1 - L2)"
        ),
        rhs="(zeta(2)*n**2/2 + 30*zp(2))*sigma_2",
        default_n=(1, 20),
    ),
    "tau": PrintedIdentity(
        name="tau",
        d=3,
        r1=2,
        r2=2,
        weighting=_PSI,
        rhs="-(zeta(2)*n**2 + 420*zp(2))*sigma_2",
        cusp=(PrintedCusp(6, 5, "-75/8", a2="-24"),),
    ),
    "d1r0": PrintedIdentity(
        name="d1r0",
        d=1,
        r1=0,
        r2=0,
        weighting="(n2 - n1)/n*(L1 - L2) + 2",
        rhs="(2 - log(4*pi**2*n))*sigma_0",
    ),
    "d3r0": PrintedIdentity(
        name="d3r0",
        d=3,
        r1=0,
        r2=0,
        weighting=(
            "11 - 60*n1*n2/n**2"
            " - (3*n1**3 - 27*n1**2*n2 + 27*n1*n2**2 - 3*n2**3)/n**3*(L1 - L2)"
        ),
        rhs="(11 - 3*log(4*pi**2*n))*sigma_0",
    ),
    "psi2": PrintedIdentity(
        name="psi2",
        d=8,
        r1=2,
        r2=4,
        weighting=_PSI2,
        rhs=(
            "(zeta(4)*n**4/180180 + 33*zeta(5)/(4*pi**4))*sigma_2"
            " + (-zeta(2)*n**2/8190 + zeta(3)/(4*pi**2))*sigma_4"
        ),
        cusp=(
            PrintedCusp(9, 8, "(-29 + 3551/sqrt(144169))/168", a2="540 - 12*sqrt(144169)"),
            PrintedCusp(9, 8, "(-29 - 3551/sqrt(144169))/168", a2="540 + 12*sqrt(144169)"),
        ),
        default_n=(1, 6),
    ),
}

# Cancellations whose weights live outside this package.
EXTERNAL_SCENARIOS: dict[str, dict[str, str | int]] = {
    "physics_r7": {"r": 7, "status": "requires external constants"},
    "physics_r9": {"r": 9, "status": "requires external constants"},
}


def get_identity(name: str) -> PrintedIdentity:
    try:
        return IDENTITIES[name]
    except KeyError:
        if name in EXTERNAL_SCENARIOS:
            status = EXTERNAL_SCENARIOS[name]["status"]
            raise DomainError(f"identity {name!r} is not checked: {status}") from None
        known = ", ".join(sorted(IDENTITIES))
        raise DomainError(f"unknown identity {name!r}; known: {known}") from None
