from fractions import Fraction

import pytest
from mpmath import mpf

from divisum.exceptions import DomainError, SingularArgumentError
from divisum.jacobi import (
    LogLinearValue,
    QKernel,
    _FarFieldSeries,
    jacobi_polynomial,
    jacobi_second_kind,
    laurent_at_infinity,
    q_construct,
    q_eval_at,
    q_eval_exact,
    q_eval_hypergeometric,
    q_eval_real,
    q_quadrature,
)


def _relative(a, b):
    return abs(a.value - b.value) / abs(b.value)


class TestJacobiPolynomial:
    """Test cases for the Jacobi polynomials"""

    def test_legendre(self):
        """Test P_2^(0,0) = (3x² - 1)/2"""
        P = jacobi_polynomial(2, 0, 0)
        assert P.coefficients == (Fraction(-1, 2), Fraction(0), Fraction(3, 2))

    def test_value_at_one(self):
        """Test P_d^(α,β)(1) = C(d+α, d)"""
        assert jacobi_polynomial(3, 2, 4)(1) == 10


class TestLogLinearValue:
    """Test cases for exact a + b·log(u) values"""

    def test_canonical_argument(self):
        """Test that log(1/u) is stored as -log(u)"""
        value = LogLinearValue(Fraction(1), Fraction(2), Fraction(1, 4))
        assert value.u == 4
        assert value.b == -2

    def test_zero_log_is_dropped(self):
        """Test that b·log(1) collapses to a rational"""
        value = LogLinearValue(Fraction(3), Fraction(5), Fraction(1))
        assert value.b == 0
        assert value.to_real(64).contains(3)

    def test_adding_different_logs_raises(self):
        """Test that logs of different arguments are not combined"""
        with pytest.raises(DomainError):
            LogLinearValue(1, 1, 2) + LogLinearValue(1, 1, 3)


class TestQConstruct:
    """Test cases for the closed form of Q_d^(α,β)"""

    def test_lowest_degree(self):
        """Test Q_1^(0,0)(x) = (x/2)·log|(x+1)/(x-1)| - 1"""
        Q = q_construct(1, 0, 0)
        assert Q.P.coefficients == (Fraction(0), Fraction(1, 2))
        assert Q.R.coefficients == (Fraction(-1),)
        assert Q.asymptotic_constant == Fraction(1, 3)

    def test_decay_at_infinity(self):
        """Test that the Laurent series starts at x^(-d-α-β-1)"""
        for d, alpha, beta in [(1, 0, 0), (1, 2, 2), (2, 2, 0), (3, 2, 2), (2, 4, 2)]:
            Q = q_construct(d, alpha, beta)
            D = Q.decay_order
            coeffs = laurent_at_infinity(Q, D)
            assert all(c == 0 for c in coeffs[:D])
            assert coeffs[D] == Q.asymptotic_constant

    def test_reflection(self):
        """Test Q_d^(α,β)(-x) = (-1)^(d+1)·Q_d^(β,α)(x) for even α, β"""
        x = Fraction(5, 3)
        for d in (1, 2, 3):
            left = q_eval_at(q_construct(d, 2, 0), -x)
            right = q_eval_at(q_construct(d, 0, 2), x) * (-1) ** (d + 1)
            assert left == right

    def test_degree_zero_only_through_second_kind(self):
        """Test that q_construct needs d >= 1 while jacobi_second_kind accepts d = 0"""
        with pytest.raises(DomainError):
            q_construct(0, 0, 0)
        Q = jacobi_second_kind(0, 0, 0)
        assert Q.P.coefficients == (Fraction(1, 2),)
        assert Q.R.is_zero()

    def test_odd_exponent_rejected(self):
        """Test that odd α or β is rejected"""
        with pytest.raises(DomainError):
            q_construct(1, 1, 0)


class TestQEvaluation:
    """Test cases for exact and numerical evaluation of Q"""

    def test_singular_arguments(self):
        """Test that x = ±1 and n1·n2 = 0 are rejected"""
        Q = q_construct(1, 2, 2)
        with pytest.raises(SingularArgumentError):
            q_eval_at(Q, 1)
        with pytest.raises(SingularArgumentError):
            q_eval_exact(Q, 0, 3)
        with pytest.raises(SingularArgumentError):
            q_eval_exact(Q, 2, -2)

    def test_exact_matches_quadrature_outside(self, prec):
        """Test the closed form against the integral representation for |x| > 1"""
        Q = q_construct(2, 2, 2)
        x = Fraction(5, 2)
        assert _relative(q_eval_real(Q, x, prec), q_quadrature(Q, x, prec)) < mpf(10) ** -25

    def test_exact_matches_principal_value_inside(self, prec):
        """Test the closed form against the principal-value integral for |x| < 1"""
        Q = q_construct(1, 2, 2)
        x = Fraction(1, 3)
        assert _relative(q_eval_real(Q, x, prec), q_quadrature(Q, x, prec)) < mpf(10) ** -15

    def test_hypergeometric_form(self, prec):
        """Test the ₂F₁ representation against the closed form"""
        Q = q_construct(3, 2, 0)
        x = Fraction(5, 2)
        value = q_eval_hypergeometric(Q, x, prec)
        assert _relative(value, q_eval_real(Q, x, prec)) < mpf(10) ** -25

    def test_far_field_series(self, prec):
        """Test the far-field series against the exact value at high precision"""
        Q = q_construct(1, 2, 2)
        far = q_eval_real(Q, 7, prec)
        exact = q_eval_at(Q, 7).to_real(2 * prec)
        assert _relative(far, exact) < mpf(10) ** -30

    def test_kernel_terms(self, prec):
        """Test QKernel on both sides of the far-field cutoff"""
        Q = q_construct(2, 2, 4)
        kernel = QKernel(Q, prec)
        for n1, n2 in [(3, 2), (40, -35), (-35, 40), (1, 6)]:
            value, err = kernel.term(n1, n2)
            exact = q_eval_exact(Q, n1, n2).to_real(2 * prec)
            assert abs(value - exact.value) <= err + abs(exact.value) * mpf(10) ** -30

    def test_far_field_coefficients_share_precision(self):
        """Test that extending at a lower precision keeps the stored one"""
        series = _FarFieldSeries(2, 3, 5)
        series._extend(4, 256)
        coeffs = series._extend(12, 64)
        assert len(coeffs) == 12
        assert {p for _, p in coeffs} == {256}
        series._extend(16, 320)
        assert {p for _, p in series.coefficients} == {320}
