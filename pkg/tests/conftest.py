import pytest

from divisum.main import main
from divisum.verify import Schedule, eigenforms_for

PREC = 128


@pytest.fixture
def prec():
    return PREC


@pytest.fixture
def cache_dir(tmp_path):
    """Empty eigenform cache directory for one test"""
    path = tmp_path / "cache"
    path.mkdir()
    return str(path)


@pytest.fixture
def fast_schedule():
    """Short doubling schedule: N = 256 .. 4096"""
    return Schedule(base_N=256, levels=5, terms=3)


@pytest.fixture(scope="session")
def delta():
    """Normalized Δ at the default test precision"""
    return eigenforms_for(12, PREC)[0]


@pytest.fixture
def run_cli(capsys, cache_dir):
    """Run the command line and return (exit code, stdout)"""

    def _run(*argv: str, use_cache: bool = True) -> tuple[int, str]:
        args = list(argv)
        if use_cache:
            args = ["--cache-dir", cache_dir, *args]
        try:
            code = main(args)
        except SystemExit as exc:
            code = exc.code
        return code, capsys.readouterr().out

    return _run
