import pytest
from hypothesis import HealthCheck, settings

from condrel.fixtures import cover_graph, detour_graph, diamond_graph

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def diamond():
    return diamond_graph()


@pytest.fixture
def detour():
    return detour_graph()


@pytest.fixture
def cover():
    return cover_graph()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda x: int(x.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
