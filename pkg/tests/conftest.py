from __future__ import annotations

from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

from mrdcodes.classify import enumerate_semifields
from mrdcodes.constructions import exceptional_nearfield_gl2_11, fixture_code

settings.register_profile("mrd", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("mrd")

# criterion number -> list of (test id, passed)
_CRITERIA: dict[int, list[tuple[str, bool]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _CRITERIA[marker.args[0]].append((item.nodeid, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        runs = _CRITERIA[n]
        ok = all(passed for _, passed in runs)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({sum(p for _, p in runs)}/{len(runs)} checks)")


# ---------------------------------------------------------------------------
# shared expensive objects


@pytest.fixture(scope="session")
def census16():
    return enumerate_semifields(2, 4)


@pytest.fixture(scope="session")
def census27():
    return enumerate_semifields(3, 3)


@pytest.fixture(scope="session")
def code2():
    return fixture_code("code2")


@pytest.fixture(scope="session")
def code3():
    return fixture_code("code3")


@pytest.fixture(scope="session")
def sec6_G():
    return fixture_code("sec6_G_basis")


@pytest.fixture(scope="session")
def sec6_C():
    return fixture_code("sec6_C_basis")


@pytest.fixture(scope="session")
def nearfield11():
    return exceptional_nearfield_gl2_11()
