import pytest
from mpmath import mp, mpf

from divisum.exceptions import DomainError
from divisum.lfun import (
    completed_L,
    completed_L_by_quadrature,
    inner_product_alternate,
    inner_product_eisenstein_product,
    l_value,
    lambda_coeff,
    petersson_norm,
)
from divisum.sums import ConvolutionParams

# <Δ, Δ> over SL_2(Z)\H with y^k dμ
DELTA_NORM = "1.035362056804320922347816812e-6"


def _relative(a, b):
    return abs(a.value - b.value) / abs(b.value)


class TestCompletedL:
    """Test cases for completed L-values"""

    def test_functional_equation(self, delta, prec):
        """Test L*(Δ, s) = L*(Δ, 12 - s)"""
        for s in (1, 3, 5):
            assert completed_L(delta, s, prec).value.overlaps(
                completed_L(delta, 12 - s, prec).value
            )

    def test_series_matches_quadrature(self, delta, prec):
        """Test the incomplete-gamma series against the Mellin integral"""
        series = completed_L(delta, 5, prec).value
        quadrature = completed_L_by_quadrature(delta, 5, prec)
        assert _relative(series, quadrature) < mpf(10) ** -20

    def test_critical_strip_only(self, delta, prec):
        """Test that s outside [1, k - 1] is rejected"""
        with pytest.raises(DomainError):
            completed_L(delta, 0, prec)
        with pytest.raises(DomainError):
            completed_L(delta, 12, prec)

    def test_l_value_is_positive(self, delta, prec):
        """Test that L(Δ, s) is positive right of the center"""
        for s in (6, 7, 11):
            assert l_value(delta, s, prec).lower > 0


class TestPetersson:
    """Test cases for the Petersson norm"""

    def test_delta_norm(self, delta, prec):
        """Test <Δ, Δ> against its known value"""
        norm = petersson_norm(delta, prec).value
        with mp.workprec(prec):
            expected = mpf(DELTA_NORM)
            assert abs(norm.value - expected) / expected < mpf(10) ** -20


class TestLambda:
    """Test cases for the cusp-form coefficients λ_f"""

    def test_weight_mismatch(self, delta, prec):
        """Test that the eigenform weight must equal k"""
        with pytest.raises(DomainError):
            lambda_coeff(ConvolutionParams(1, 2, 2, 1), delta, prec)

    def test_sign(self, delta, prec):
        """Test that λ_Δ carries the sign (-1)^(d + r2/2 + 1)"""
        first = lambda_coeff(ConvolutionParams(3, 2, 2, 1), delta, prec)
        second = lambda_coeff(ConvolutionParams(2, 4, 2, 1), delta, prec)
        assert first.value < 0
        assert second.value > 0

    @pytest.mark.parametrize("k1, k2, m1, m2", [(3, 3, 1, 1), (4, 2, 1, 0), (2, 4, 0, 2)])
    def test_inner_product_forms_agree(self, delta, prec, k1, k2, m1, m2):
        """Test the two functional-equation forms of the Eisenstein inner product"""
        value = inner_product_eisenstein_product(delta, k1, k2, m1, m2, prec)
        alternate = inner_product_alternate(delta, k1, k2, m1, m2, prec)
        assert value.overlaps(alternate)
        assert value.value != 0

    def test_inner_product_rejects_bad_split(self, delta, prec):
        """Test that 2k1 + 2k2 must equal the weight"""
        with pytest.raises(DomainError):
            inner_product_eisenstein_product(delta, 3, 2, 1, 1, prec)
