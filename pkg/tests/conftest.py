import sys

import pytest

from krtoeplitz.builder import BuildParams, TargetSpec, build
from krtoeplitz.diagram import append_level, new_root


@pytest.fixture(scope="session")
def two_target():
    t = TargetSpec(("1/4", "3/4"))
    return t, build(t, BuildParams(depth=8, L_floor=8))


@pytest.fixture(scope="session")
def three_target():
    t = TargetSpec(("1/8", "1/2", "7/8"))
    return t, build(t, BuildParams(depth=6, L_floor=8))


@pytest.fixture(scope="session")
def one_target():
    t = TargetSpec(("1/2",))
    return t, build(t, BuildParams(depth=5, L_floor=8))


def small_diagram():
    """Hand-made 3-level diagram with 3 and 4 columns."""
    d = new_root()
    d = append_level(d, [[1, 1, 1, 2], [1, 2, 2, 2], [1, 1, 2, 2]])
    d = append_level(d, [[1, 1, 2, 3, 3], [1, 2, 2, 3, 3], [1, 2, 3, 3, 3], [1, 1, 1, 2, 3]])
    return d


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
