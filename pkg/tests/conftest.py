import random
import sys

import pytest

from wilson_triality.maps import group_for
from wilson_triality.search import SearchParams, build_triple, run_search


@pytest.fixture(scope="session")
def g27():
    return group_for(3, 1)


@pytest.fixture(scope="session")
def g64():
    return group_for(2, 2)


@pytest.fixture(scope="session")
def search_q3():
    return run_search(SearchParams(3, 1, report_all_orders=True))


@pytest.fixture(scope="session")
def search_q4():
    return run_search(SearchParams(2, 2, report_all_orders=True))


@pytest.fixture(scope="session")
def triple_q3(g27, search_q3):
    s = search_q3[1][0]
    return build_triple(g27, s.a, s.b, s.c)


@pytest.fixture(scope="session")
def geometry_q3(triple_q3):
    from wilson_triality.geometry import build_geometry

    return build_geometry(triple_q3)


@pytest.fixture
def rng():
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
