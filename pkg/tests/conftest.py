import math

import pytest

from pcwdesign import GAAS, build_compound, design_radius

REF_A, REF_LAMBDA, REF_H, REF_R = 238.0, 925.0, 160.0, 80.0
THETA_60 = math.pi / 3


@pytest.fixture(scope="session")
def reference_design():
    return design_radius(REF_A, REF_LAMBDA, REF_H, GAAS, THETA_60)


@pytest.fixture(scope="session")
def compound_233_238():
    return build_compound(233.0, 238.0, 925.0, 925.0, REF_H)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
