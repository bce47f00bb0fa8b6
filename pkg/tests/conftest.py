import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def eigh_oracle(m):
    """Descending eigenvalues from LAPACK, used only as an independent check."""
    return np.linalg.eigh(np.asarray(m))[0][::-1]


# -- acceptance criteria report --------------------------------------------------------

_CRITERIA = {}


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records one acceptance line and prints it."""

    def record(k, ok, detail):
        _CRITERIA[k] = (bool(ok), detail)
        print(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    reports = [r for rs in terminalreporter.stats.values() for r in rs if hasattr(r, "nodeid")]
    if not any("test_acceptance.py" in r.nodeid for r in reports):
        return
    from test_acceptance import CRITERIA_TITLES

    terminalreporter.section("acceptance criteria")
    for k, title in CRITERIA_TITLES.items():
        ok, detail = _CRITERIA.get(k, (False, "did not complete"))
        terminalreporter.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
