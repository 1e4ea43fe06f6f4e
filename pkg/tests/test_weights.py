import dataclasses
from fractions import Fraction

import pytest

from divisum.exceptions import DomainError, GrowthConditionError, NotQMultipleError
from divisum.identities import EXTERNAL_SCENARIOS, IDENTITIES, get_identity
from divisum.jacobi import q_eval_exact
from divisum.sums import ConvolutionParams
from divisum.weights import (
    canonicalize_phi,
    certify,
    gamma_factor,
    laurent_at_infinity,
    parse_weighting,
    sample_points,
)

# Q_1^(0,0)((n2 - n1)/n) written out
Q100 = "(n2 - n1)/(2*n)*(L2 - L1) - 1"


def _params(name: str, n: int) -> ConvolutionParams:
    identity = IDENTITIES[name]
    return ConvolutionParams(identity.d, identity.r1, identity.r2, n)


class TestParseWeighting:
    """Test cases for parsing weightings"""

    def test_unknown_symbol(self):
        """Test that symbols other than n1, n2, n, L1, L2 are rejected"""
        with pytest.raises(DomainError):
            parse_weighting("x + n1")

    def test_syntax_error(self):
        """Test that unparsable text raises DomainError"""
        with pytest.raises(DomainError):
            parse_weighting("n1 +")


class TestCanonicalize:
    """Test cases for the canonical form of a weighting"""

    def test_q_itself(self):
        """Test the canonical data of Q_1^(0,0)"""
        w = canonicalize_phi(Q100, ConvolutionParams(1, 0, 0, 3))
        assert w.A == {0: Fraction(-1)}
        assert w.B == {}
        assert w.C == {0: Fraction(-1, 2), 1: Fraction(1, 3)}
        assert w.D == {0: Fraction(-1, 2), 1: Fraction(1, 3)}
        assert gamma_factor(w) == 1

    def test_evaluate_matches_q(self):
        """Test that the canonical weighting evaluates to Q along n1 + n2 = n"""
        p = ConvolutionParams(1, 0, 0, 3)
        w = canonicalize_phi(Q100, p)
        for n1, n2 in [(5, -2), (1, 2), (-4, 7)]:
            assert w.evaluate(n1, n2) == q_eval_exact(p.q, n1, n2)
        with pytest.raises(DomainError):
            w.evaluate(1, 1)

    def test_conjecture_data(self):
        """Test C_1 = -30/n and the negative powers of the conjecture weighting"""
        w = canonicalize_phi(IDENTITIES["conjecture"].weighting, _params("conjecture", 3))
        assert w.C == {0: Fraction(15), 1: Fraction(-10)}
        assert w.A[-2] == Fraction(-9, 4)
        assert w.B[-2] == Fraction(-9, 4)
        assert all(j < 0 for j in w.B)

    def test_decay(self):
        """Test that a growth-checked weighting has no Laurent terms through t^(d+r1+r2)"""
        w = canonicalize_phi(IDENTITIES["tau"].weighting, _params("tau", 2))
        assert laurent_at_infinity(w, w.d + w.r1 + w.r2) == {}

    def test_logs_must_cancel(self):
        """Test that an uncancelled log|n1| fails the growth check"""
        with pytest.raises(GrowthConditionError):
            canonicalize_phi("L1", ConvolutionParams(1, 0, 0, 3))

    def test_slow_decay_rejected(self):
        """Test that log|n2/n1| alone decays too slowly"""
        with pytest.raises(GrowthConditionError):
            canonicalize_phi("L1 - L2", ConvolutionParams(1, 0, 0, 3))

    def test_pole_order_above_r(self):
        """Test that a pole of order above r1 at n1 = 0 is rejected"""
        with pytest.raises(DomainError):
            canonicalize_phi("1/n1**2", ConvolutionParams(1, 0, 0, 3))

    def test_pole_elsewhere(self):
        """Test that poles off n1 = 0 and n2 = 0 are rejected"""
        with pytest.raises(DomainError):
            canonicalize_phi("1/(n1 - 5)", ConvolutionParams(1, 2, 2, 3))

    def test_log_degree_above_d(self):
        """Test that C_j for j > d is rejected"""
        with pytest.raises(DomainError):
            canonicalize_phi("n1**2*(L1 - L2)", ConvolutionParams(1, 2, 2, 3))

    def test_nonlinear_log(self):
        """Test that logs may only appear linearly"""
        with pytest.raises(DomainError):
            canonicalize_phi("L1**2", ConvolutionParams(1, 2, 2, 3))


class TestCertify:
    """Test cases for the Γ-factor of printed weightings"""

    @pytest.mark.parametrize(
        "name, gamma",
        [
            ("conjecture", Fraction(-10)),
            ("tau", Fraction(42)),
            ("d1r0", Fraction(-2)),
            ("d3r0", Fraction(-6)),
            ("psi2", Fraction(2, 45)),
        ],
    )
    def test_printed_gamma(self, name, gamma):
        """Test the Γ-factor derived from each printed weighting"""
        for n in (1, 2, 5):
            w = canonicalize_phi(IDENTITIES[name].weighting, _params(name, n))
            assert certify(w) == gamma

    @pytest.mark.parametrize("n", range(2, 11))
    def test_tau_gamma_for_larger_n(self, n):
        """Test that the τ weighting certifies with Γ = 42 at every n"""
        w = canonicalize_phi(IDENTITIES["tau"].weighting, _params("tau", n))
        assert certify(w) == 42

    def test_gamma_for_negative_n(self):
        """Test that Γ is the same for negative n"""
        w = canonicalize_phi(IDENTITIES["conjecture"].weighting, _params("conjecture", -3))
        assert certify(w) == -10

    def test_leading_log_coefficients(self):
        """Test C_d for the printed weightings"""
        expected = {
            "tau": Fraction(2520, 8),
            "d1r0": Fraction(-2, 2),
            "d3r0": Fraction(-60, 8),
            "psi2": Fraction(-7106, 2**8),
        }
        for name, c_d in expected.items():
            identity = IDENTITIES[name]
            w = canonicalize_phi(identity.weighting, _params(name, 2))
            assert w.C[identity.d] == c_d

    def test_tampered_weighting(self):
        """Test that a modified weighting is not certified"""
        w = canonicalize_phi(Q100, ConvolutionParams(1, 0, 0, 3))
        tampered = dataclasses.replace(w, A={0: Fraction(0)}, expression=None)
        with pytest.raises(NotQMultipleError):
            certify(tampered)

    def test_sample_points(self):
        """Test that sample points lie on n1 + n2 = n with n1·n2 != 0"""
        p = ConvolutionParams(3, 2, 2, -4)
        points = sample_points(p)
        assert len(points) == 3 + 2 + 2 + 3
        assert all(n1 + n2 == -4 and n1 * n2 != 0 for n1, n2 in points)
        assert len({abs(Fraction(n2, n1)) for n1, n2 in points}) == len(points)

    def test_unknown_identity(self):
        """Test that an unknown identity name raises DomainError"""
        with pytest.raises(DomainError):
            get_identity("missing")

    @pytest.mark.parametrize("name", sorted(EXTERNAL_SCENARIOS))
    def test_external_scenarios_are_not_identities(self, name):
        """Test that cancellations needing outside constants are refused by name"""
        assert name not in IDENTITIES
        with pytest.raises(DomainError, match="requires external constants"):
            get_identity(name)
