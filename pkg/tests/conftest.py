from __future__ import annotations

import pytest

from torsion_units.chartab import load_bundled
from torsion_units.lutharpassi import load_selections


@pytest.fixture(scope="session")
def hs():
    return load_bundled("HS")


@pytest.fixture(scope="session")
def a5():
    return load_bundled("A5")


@pytest.fixture(scope="session")
def paper():
    return load_selections()


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one line per acceptance criterion; echoed in the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
