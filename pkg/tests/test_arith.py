from fractions import Fraction

import pytest
from mpmath import mp, mpf

from divisum.arith import (
    PrecisionReal,
    bernoulli,
    constants,
    digamma_half,
    harmonic,
    incomplete_gamma_upper,
    zeta_even,
    zeta_prime_neg_even,
    zeta_value,
)
from divisum.exceptions import DomainError, PoleError


class TestPrecisionReal:
    """Test cases for the ball arithmetic"""

    def test_exact_integer_has_zero_radius(self, prec):
        """Test that small integers are represented exactly"""
        x = PrecisionReal.exact(7, prec)
        assert x.error_radius == 0
        assert x.contains(7)

    def test_rational_is_contained(self, prec):
        """Test that a rounded rational stays inside its ball"""
        x = PrecisionReal.exact(Fraction(1, 3), prec)
        assert x.contains(Fraction(1, 3))
        assert x.error_radius > 0

    def test_arithmetic_encloses_exact_result(self, prec):
        """Test that + - * / keep the exact rational result inside"""
        a = PrecisionReal.exact(Fraction(2, 7), prec)
        b = PrecisionReal.exact(Fraction(5, 11), prec)
        assert (a + b).contains(Fraction(2, 7) + Fraction(5, 11))
        assert (a - b).contains(Fraction(2, 7) - Fraction(5, 11))
        assert (a * b).contains(Fraction(10, 77))
        assert (a / b).contains(Fraction(22, 35))
        assert (1 - a).contains(Fraction(5, 7))
        assert (a**3).contains(Fraction(8, 343))

    def test_integer_minus_rational_keeps_precision(self, prec):
        """Test that 1 - 1/3 at the working precision contains 2/3"""
        one = PrecisionReal.exact(1, prec)
        third = PrecisionReal.exact(Fraction(1, 3), prec)
        diff = one - third
        assert diff.contains(Fraction(2, 3))
        assert diff.error_radius < mpf(2) ** (10 - prec)

    def test_negation_and_abs_keep_precision(self, prec):
        """Test that -x and |x| are exact outside a workprec block"""
        x = PrecisionReal.exact(Fraction(-1, 3), prec)
        assert (-x).contains(Fraction(1, 3))
        assert abs(x).contains(Fraction(1, 3))
        assert (-x).error_radius == x.error_radius
        assert abs(x).value == -x.value

    def test_bounds_enclose_value(self, prec):
        """Test that lower and upper bracket the exact value"""
        x = PrecisionReal.exact(Fraction(1, 7), prec)
        with mp.workprec(prec + 64):
            exact = mpf(1) / 7
            assert x.lower <= exact <= x.upper
            assert x.upper - x.lower == 2 * x.error_radius

    def test_division_by_zero_ball_raises(self, prec):
        """Test that dividing by a ball containing zero raises PoleError"""
        zero = PrecisionReal(mpf(0), mpf("1e-10"), prec)
        with pytest.raises(PoleError):
            PrecisionReal.exact(1, prec) / zero

    def test_negative_radius_rejected(self, prec):
        """Test that a negative error radius is rejected"""
        with pytest.raises(DomainError):
            PrecisionReal(mpf(1), mpf(-1), prec)

    def test_log_of_nonpositive_ball_raises(self, prec):
        """Test that log needs a strictly positive ball"""
        with pytest.raises(DomainError):
            PrecisionReal.exact(-2, prec).log()

    def test_exp_log_roundtrip(self, prec):
        """Test that exp(log x) encloses x"""
        x = PrecisionReal.exact(Fraction(3, 2), prec)
        assert x.log().exp().contains(Fraction(3, 2))

    def test_overlaps(self, prec):
        """Test overlap of two balls around the same value"""
        a = PrecisionReal(mpf(1), mpf("1e-20"), prec)
        b = PrecisionReal(mpf(1) + mpf("1e-21"), mpf("1e-20"), prec)
        c = PrecisionReal(mpf(2), mpf("1e-20"), prec)
        assert a.overlaps(b)
        assert not a.overlaps(c)

    def test_repr_shows_radius(self, prec):
        """Test the value ± radius representation"""
        text = repr(PrecisionReal.exact(Fraction(1, 4), prec))
        assert text.startswith("PrecisionReal(0.25")
        assert "±" in text


class TestConstants:
    """Test cases for special values"""

    def test_bernoulli(self):
        """Test exact Bernoulli numbers"""
        assert bernoulli(0) == 1
        assert bernoulli(1) == Fraction(-1, 2)
        assert bernoulli(2) == Fraction(1, 6)
        assert bernoulli(12) == Fraction(-691, 2730)

    def test_zeta_even(self):
        """Test ζ(2) = π²/6 and ζ(4) = π⁴/90"""
        assert zeta_even(2) == Fraction(1, 6)
        assert zeta_even(4) == Fraction(1, 90)
        with pytest.raises(DomainError):
            zeta_even(3)

    def test_zeta_value_matches_mpmath(self, prec):
        """Test ζ(m) against mpmath for even and odd m"""
        with mp.workprec(prec + 32):
            for m in (2, 3, 5, 8):
                assert zeta_value(m, prec).contains(mp.zeta(m))

    def test_zeta_prime_at_negative_even(self, prec):
        """Test ζ'(-2) = -ζ(3)/(4π²) against mpmath"""
        with mp.workprec(prec + 32):
            expected = mp.zeta(-2, derivative=1)
            value = zeta_prime_neg_even(2, prec)
            assert abs(value.value - expected) < mpf(10) ** -35
            assert value.value < 0

    def test_zeta_pole(self, prec):
        """Test that ζ(1) raises PoleError"""
        with pytest.raises(PoleError):
            zeta_value(1, prec)

    def test_harmonic(self):
        """Test exact harmonic numbers"""
        assert harmonic(0) == 0
        assert harmonic(3) == Fraction(11, 6)

    def test_digamma_half(self, prec):
        """Test ψ(1/2) = -γ - 2 log 2"""
        c = constants(prec)
        expected = -c.euler_gamma - c.log2 * 2
        assert digamma_half(0, prec).overlaps(expected)

    def test_incomplete_gamma_upper(self, prec):
        """Test Γ(1, x) = e^{-x}"""
        value = incomplete_gamma_upper(1, Fraction(3, 2), prec)
        expected = PrecisionReal.exact(Fraction(-3, 2), prec).exp()
        assert value.overlaps(expected)
