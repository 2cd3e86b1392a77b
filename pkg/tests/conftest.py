import pytest

from piezomag_saw import TERFENOL_D, rayleigh
from piezomag_saw.quantize import normalize_single_phonon


@pytest.fixture(scope="session")
def terfenol():
    return TERFENOL_D


@pytest.fixture(scope="session")
def mode10(terfenol):
    return rayleigh.mode_at_frequency(terfenol, 10e9)


@pytest.fixture(scope="session")
def qmode10(terfenol, mode10):
    return normalize_single_phonon(mode10, terfenol, 1e-6)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT_LINES:
            terminalreporter.write_line(line)
