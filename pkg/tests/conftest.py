import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from georestrict.lfunctions import load_maass_form

DATA = Path(__file__).resolve().parent.parent / "data"
EVEN_FILE = DATA / "maass_even_13.78.json"
ODD_FILE = DATA / "maass_odd_9.53.json"

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture(scope="session")
def even_form():
    return load_maass_form(EVEN_FILE)


@pytest.fixture(scope="session")
def odd_form():
    return load_maass_form(ODD_FILE)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
