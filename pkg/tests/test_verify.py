from fractions import Fraction

import pytest
import sympy
from mpmath import mp, mpf

from divisum.arith import PrecisionReal
from divisum.boundary import z_part
from divisum.exceptions import DomainError
from divisum.identities import IDENTITIES
from divisum.modforms import tau
from divisum.sums import ConvolutionParams
from divisum.verify import (
    PRINTED_COMBINATION,
    Schedule,
    _printed_rhs_matches,
    d_route_symbolic,
    eigenforms_for,
    extract_cusp_coeffs,
    passes,
    physics_cancellation,
    physics_tolerance,
    printed_cusp_matches,
    rhs_components,
    verify_identity,
    verify_printed,
    verify_range,
)
from divisum.weights import canonicalize_phi, certify


class TestPassRule:
    """Test cases for the residual test"""

    def test_relative_tolerance(self, prec):
        """Test that the residual is compared with rel_tol·|rhs|"""
        rhs = PrecisionReal.exact(1, prec)
        near = PrecisionReal(mpf(1) + mpf("1e-8"), mpf(0), prec)
        far = PrecisionReal(mpf(1) + mpf("1e-4"), mpf(0), prec)
        assert passes(near, rhs, 1e-6)[1]
        assert not passes(far, rhs, 1e-6)[1]

    def test_error_radii_widen_tolerance(self, prec):
        """Test that three combined radii are allowed on top of rel_tol"""
        rhs = PrecisionReal.exact(1, prec)
        lhs = PrecisionReal(mpf(1) + mpf("1e-4"), mpf("1e-4"), prec)
        residual, ok = passes(lhs, rhs, 1e-6)
        assert ok
        assert abs(residual - mpf("1e-4")) < mpf("1e-10")

    def test_zero_tolerance_at_full_precision(self, prec):
        """Test that rel_tol = 0 compares at the working precision of the balls"""
        third = PrecisionReal.exact(Fraction(1, 3), prec)
        rhs = PrecisionReal.exact(1, prec) - PrecisionReal.exact(Fraction(2, 3), prec)
        residual, ok = passes(third, rhs, 0.0)
        assert ok
        assert residual < mpf(2) ** (8 - prec)

    def test_zero_rhs(self, prec):
        """Test the floor used when the right-hand side vanishes"""
        zero = PrecisionReal.exact(0, prec)
        assert passes(zero, zero, 1e-6)[1]
        assert not passes(PrecisionReal(mpf("1e-20"), mpf(0), prec), zero, 1e-6)[1]


class TestRightHandSide:
    """Test cases for the predicted right-hand side"""

    def test_without_cusp_forms(self, prec):
        """Test that the RHS is the Z-part when S_k = 0"""
        p = ConvolutionParams(1, 2, 2, 3)
        prediction = rhs_components(p, prec)
        assert prediction.dim == 0
        assert prediction.value.overlaps(z_part(p, prec))

    def test_weight_12(self, prec, cache_dir):
        """Test the cusp part λ_Δ·τ(n)/n^d for k = 12"""
        p = ConvolutionParams(3, 2, 2, 2)
        prediction = rhs_components(p, prec, cache_dir)
        assert prediction.dim == 1
        expected = prediction.lambdas[0] * tau(2) / Fraction(8)
        assert prediction.cusp_part.overlaps(expected)

    @pytest.mark.parametrize("d, r1, r2, n", [(1, 4, 0, 3), (1, 2, 6, 2), (3, 0, 4, -2)])
    def test_swap_symmetry(self, prec, cache_dir, d, r1, r2, n):
        """Test that the RHS follows the LHS under relabeling (r1, n1) and (r2, n2)"""
        p = ConvolutionParams(d, r1, r2, n)
        left = rhs_components(p, prec, cache_dir).value
        right = rhs_components(p.swapped(), prec, cache_dir).value * (-1) ** (d + 1)
        assert abs(left.value - right.value) <= abs(left.value) * mpf(10) ** -20

    def test_eigenforms_for_empty_space(self, prec):
        """Test that weights without cusp forms give no eigenforms"""
        assert eigenforms_for(14, prec) == []


class TestVerifyIdentity:
    """Test cases for checking the identity numerically"""

    def test_weight_12_passes(self, prec, fast_schedule, cache_dir):
        """Test the identity for d = 3, r = (2, 2), n = 1..2"""
        reports = verify_range(3, 2, 2, [2, 1], fast_schedule, prec, cache_dir=cache_dir)
        assert [r.params.n for r in reports] == [1, 2]
        for report in reports:
            assert report.passed, report.residual
            assert report.wall_ms > 0

    def test_wrong_rhs_fails(self, prec, fast_schedule):
        """Test that a perturbed right-hand side is detected"""
        p = ConvolutionParams(3, 2, 2, 1)
        report = verify_identity(p, fast_schedule, prec)
        shifted = report.rhs + PrecisionReal.exact(Fraction(1, 1000), prec) * abs(report.rhs)
        assert not passes(report.lhs.extrapolated, shifted, 1e-6)[1]

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "d, r1, r2, ns",
        [(1, 2, 2, range(1, 6)), (2, 2, 2, range(1, 6)), (3, 2, 2, range(-3, 0)),
         (3, 0, 0, range(1, 4)), (8, 2, 4, range(1, 4))],
    )
    def test_acceptance(self, prec, cache_dir, d, r1, r2, ns):
        """Test the identity with the default schedule"""
        schedule = Schedule(base_N=20000, levels=6, terms=4)
        for report in verify_range(d, r1, r2, list(ns), schedule, prec, cache_dir=cache_dir):
            assert report.passed, (report.params, report.residual)


class TestCuspExtraction:
    """Test cases for recovering cusp coefficients from the left-hand side"""

    def test_needs_enough_n(self, prec, fast_schedule):
        """Test that n_max < dim + 2 is rejected"""
        with pytest.raises(DomainError):
            extract_cusp_coeffs(3, 2, 2, 2, fast_schedule, prec)

    def test_weight_12(self, prec, fast_schedule, cache_dir):
        """Test that a_n·n^3 is proportional to τ(n) for k = 12"""
        result = extract_cusp_coeffs(3, 2, 2, 3, fast_schedule, prec, cache_dir)
        assert result.weight == 12
        assert result.dim == 1
        assert len(result.coefficients) == 3
        assert result.expected_deviation < mpf(10) ** -6

    @pytest.mark.slow
    def test_no_cusp_forms(self, prec, cache_dir):
        """Test that nothing is left over when S_k = 0"""
        schedule = Schedule(base_N=20000, levels=6, terms=4)
        result = extract_cusp_coeffs(1, 2, 2, 4, schedule, prec, cache_dir)
        assert result.dim == 0
        assert result.consistent


class TestPrintedIdentities:
    """Test cases for the printed identities"""

    @pytest.mark.parametrize("name", sorted(IDENTITIES))
    def test_printed_rhs(self, name):
        """Test that Γ times the Z-part is the printed right-hand side"""
        identity = IDENTITIES[name]
        p = ConvolutionParams(identity.d, identity.r1, identity.r2, 1)
        gamma = certify(canonicalize_phi(identity.weighting, p))
        matches, _ = _printed_rhs_matches(gamma, p, identity)
        assert matches

    def test_tau_cusp_coefficient(self, prec, cache_dir):
        """Test 42·λ_Δ = -75/8·L(Δ, 6)/L(Δ, 5)"""
        p = ConvolutionParams(3, 2, 2, 1)
        assert printed_cusp_matches(IDENTITIES["tau"], Fraction(42), p, prec, cache_dir)

    def test_wrong_gamma_breaks_cusp_coefficient(self, prec, cache_dir):
        """Test that the cusp check is sensitive to Γ"""
        p = ConvolutionParams(3, 2, 2, 1)
        assert not printed_cusp_matches(IDENTITIES["tau"], Fraction(41), p, prec, cache_dir)

    def test_psi2_cusp_coefficients(self, prec, cache_dir):
        """Test both weight-24 cusp coefficients of the ψ₂ identity"""
        p = ConvolutionParams(8, 2, 4, 1)
        assert printed_cusp_matches(IDENTITIES["psi2"], Fraction(2, 45), p, prec, cache_dir)

    def test_verify_printed(self, prec, fast_schedule, cache_dir):
        """Test the full printed check for the τ identity"""
        reports = verify_printed(IDENTITIES["tau"], [1], fast_schedule, prec, cache_dir=cache_dir)
        printed = reports[0].printed
        assert printed.gamma == 42
        assert printed.rhs_matches and printed.cusp_matches
        assert reports[0].passed
        assert printed.rhs.overlaps(reports[0].rhs * 42)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", sorted(IDENTITIES))
    def test_printed_acceptance(self, prec, cache_dir, name):
        """Test each printed identity over its default n range"""
        identity = IDENTITIES[name]
        lo, hi = identity.default_n
        schedule = Schedule(base_N=20000, levels=6, terms=4)
        reports = verify_printed(
            identity, list(range(lo, hi + 1)), schedule, prec, cache_dir=cache_dir
        )
        assert len(reports) == hi - lo + 1
        for report in reports:
            assert report.printed.rhs_matches and report.printed.cusp_matches
            assert report.passed, (report.params, report.residual)


class TestPhysicsCancellation:
    """Test cases for the L(Δ, s) cancellation"""

    def test_routes_agree_symbolically(self):
        """Test that the D-route is minus the printed combination"""
        assert sympy.simplify(d_route_symbolic() + PRINTED_COMBINATION) == 0

    def test_tolerance(self):
        """Test the precision-dependent tolerance"""
        assert physics_tolerance(256) == mpf(10) ** -40
        assert physics_tolerance(128) == mpf(10) ** -30
        assert physics_tolerance(64) == mpf(2) ** -32

    def test_cancellation(self, prec, cache_dir):
        """Test that the combination vanishes and is sensitive to L(Δ, 2)"""
        report = physics_cancellation(prec, cache_dir)
        assert report.routes_agree_exactly
        assert abs(report.value.value) <= report.tolerance
        assert report.route_difference <= report.tolerance
        assert report.perturbation_shift > report.tolerance
        assert report.passed

    @pytest.mark.slow
    def test_cancellation_high_precision(self, cache_dir):
        """Test the cancellation at 256 bits"""
        report = physics_cancellation(256, cache_dir)
        assert report.passed
        with mp.workprec(256):
            assert abs(report.value.value) <= mpf(10) ** -40
