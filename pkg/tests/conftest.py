import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SYSTEMS = ("I", "II", "III", "IV", "V", "VI", "VII", "O", "OO", "A")


@pytest.fixture(scope="session")
def catalog():
    from si3.catalog import load_catalog

    return load_catalog()


@pytest.fixture(scope="session")
def xy_tuples(catalog):
    from si3.variety import system_xy

    return {n: system_xy(r) for n, r in catalog.systems.items()}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(RESULTS):
        title, ok, seconds, note = RESULTS[n]
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title} "
                      f"({seconds:.1f}s)  {note}")
