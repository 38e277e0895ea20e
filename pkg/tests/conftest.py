import pytest

from polelog.parser import parse_poly

QUARTIC = "x^4 + y^3*z + z^3*w + x*y*z*w"
QUINTIC = "x^5 + y^4*z + x^3*y^2 + w^5"
QUINTIC_W = "x^5 + y^4*w + z^4*w"


@pytest.fixture(scope="session")
def quartic():
    return parse_poly(QUARTIC, names=["x", "y", "z", "w"])


@pytest.fixture(scope="session")
def quintic():
    return parse_poly(QUINTIC, names=["x", "y", "z", "w"])


@pytest.fixture(scope="session")
def quintic_w():
    return parse_poly(QUINTIC_W, names=["x", "y", "z", "w"])


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(LINES):
            terminalreporter.write_line(LINES[num])
