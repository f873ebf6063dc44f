import functools

import pytest

from horolab.groups import load_catalog
from horolab.orbits import enumerate_orbit

_CRITERIA = {}


@pytest.fixture(scope="session")
def modular():
    return load_catalog("modular")


@pytest.fixture(scope="session")
def picard():
    return load_catalog("picard")


@pytest.fixture(scope="session")
def schottky():
    return load_catalog("schottky2")


@functools.lru_cache(maxsize=None)
def cusp_orbit(name, L_max):
    """Shared orbit of the first distinguished point, cached across test modules."""
    return enumerate_orbit(load_catalog(name), 0, L_max)


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed or report.skipped:
        if name not in _CRITERIA or report.failed:
            _CRITERIA[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split("_")[2])):
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[_CRITERIA[name]]
        terminalreporter.write_line(f"{name}: {outcome}")
