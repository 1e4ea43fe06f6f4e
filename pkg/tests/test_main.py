import json

import pytest

from divisum import __version__
from divisum.commands import parse_n_range
from divisum.commands.physics import skipped_scenarios
from divisum.exceptions import DomainError
from divisum.identities import EXTERNAL_SCENARIOS

FAST = (
    "--precision-bits", "128", "--base-n", "128",
    "--levels", "4", "--extrap-terms", "3",
)


class TestTableCommands:
    """Test cases for the table command"""

    def test_q_json(self, run_cli):
        """Test the closed form of Q_1^(0,0) as JSON"""
        code, out = run_cli(
            "--format", "json", "table", "q", "--d", "1", "--alpha", "0", "--beta", "0"
        )
        assert code == 0
        data = json.loads(out)
        assert data["P"] == ["0", "1/2"]
        assert data["R"] == ["-1"]
        assert data["C"] == "1/3"

    def test_q_csv(self, run_cli):
        """Test the CSV header of the Q table"""
        code, out = run_cli(
            "--format", "csv", "table", "q", "--d", "1", "--alpha", "0", "--beta", "0"
        )
        assert code == 0
        assert out.splitlines()[0] == "part,power,coefficient"

    def test_z_text(self, run_cli):
        """Test the printed Z-term"""
        code, out = run_cli(
            "--format", "text", "--precision-bits", "128",
            "table", "z", "--d", "1", "--alpha", "2", "--beta", "2", "--n", "1",
        )
        assert code == 0
        assert out.splitlines()[0] == "Z_1^(2,2)(1) = (1/40)·ζ(2) + (3/2)·ζ'(-2)"

    def test_eigenforms_without_cusp_forms(self, run_cli):
        """Test that a weight without cusp forms is a usage error"""
        code, _ = run_cli("table", "eigenforms", "--weight", "14")
        assert code == 2


class TestVerifyCommand:
    """Test cases for the verify command"""

    def test_invalid_d(self, run_cli):
        """Test that d = 0 exits with a usage error"""
        code, _ = run_cli(
            "verify", "theorem", "--d", "0", "--r1", "2", "--r2", "2", "--n", "1"
        )
        assert code == 2

    def test_zero_n(self, run_cli):
        """Test that a range containing 0 exits with a usage error"""
        code, _ = run_cli(
            "verify", "theorem", "--d", "1", "--r1", "2", "--r2", "2", "--n", "-1..1"
        )
        assert code == 2

    def test_schedule_validation(self, run_cli):
        """Test that levels must exceed the extrapolation terms"""
        code, _ = run_cli(
            "--levels", "3", "--extrap-terms", "4",
            "verify", "theorem", "--d", "1", "--r1", "2", "--r2", "2", "--n", "1",
        )
        assert code == 2

    def test_jobs_do_not_change_output(self, run_cli):
        """Test that --omit-timings output is identical for 1 and 2 jobs"""
        argv = (
            "verify", "theorem", "--d", "1", "--r1", "2", "--r2", "2", "--n", "1..2"
        )
        code1, out1 = run_cli(*FAST, "--omit-timings", "--jobs", "1", *argv)
        code2, out2 = run_cli(*FAST, "--omit-timings", "--jobs", "2", *argv)
        assert code1 == code2
        assert out1 == out2
        data = json.loads(out1)
        assert data["total"] == 2
        assert [r["params"]["n"] for r in data["reports"]] == [1, 2]
        assert "wall_ms" not in data["reports"][0]

    def test_csv_rows(self, run_cli):
        """Test one CSV row per n with the pass column"""
        code, out = run_cli(
            *FAST, "--format", "csv",
            "verify", "theorem", "--d", "1", "--r1", "2", "--r2", "2", "--n", "3",
        )
        lines = out.splitlines()
        header = "d,r1,r2,n,lhs,lhs_err,rigorous,rhs,rhs_err,residual,pass"
        assert lines[0].startswith(header)
        assert len(lines) == 2
        assert code in (0, 1)


class TestPhysicsCommand:
    """Test cases for the physics command"""

    def test_external_scenarios_listed_as_skipped(self):
        """Test that every external scenario is reported as skipped"""
        skipped = skipped_scenarios()
        assert len(skipped) == len(EXTERNAL_SCENARIOS)
        assert all("requires external constants" in entry for entry in skipped)

    @pytest.mark.parametrize("name", sorted(EXTERNAL_SCENARIOS))
    def test_external_scenario_is_not_a_verify_command(self, run_cli, name):
        """Test that external scenarios are not offered by verify"""
        code, _ = run_cli("verify", name)
        assert code == 2


class TestCacheCommand:
    """Test cases for the cache command"""

    def test_clear_empty(self, run_cli):
        """Test clearing an empty cache"""
        code, out = run_cli("--format", "json", "cache", "clear")
        assert code == 0
        assert json.loads(out) == {"removed": 0}


class TestParseNRange:
    """Test cases for n-range parsing"""

    def test_ranges(self):
        """Test single values and inclusive ranges"""
        assert parse_n_range("3") == [3]
        assert parse_n_range("1..4") == [1, 2, 3, 4]
        assert parse_n_range("-3..-1") == [-3, -2, -1]

    @pytest.mark.parametrize("text", ["0", "-2..2", "4..1", "a..b"])
    def test_invalid(self, text):
        """Test that empty ranges, n = 0 and garbage are rejected"""
        with pytest.raises(DomainError):
            parse_n_range(text)


def test_version(run_cli):
    """Test --version"""
    code, out = run_cli("--version", use_cache=False)
    assert code == 0
    assert __version__ in out
