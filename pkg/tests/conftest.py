import math

import pytest

from cantorlab import gauss_digits, middle_alpha, perturbed, two_ratio

LOG23 = math.log(2) / math.log(3)


@pytest.fixture(scope="session")
def third():
    return middle_alpha(1 / 3)


@pytest.fixture(scope="session")
def third_n():
    """Middle-third with both base intervals equal to [0, 1]."""
    return middle_alpha(1 / 3, normalized=True)


@pytest.fixture(scope="session")
def gauss():
    return gauss_digits([1, 2])


@pytest.fixture(scope="session")
def pert04():
    return perturbed(two_ratio(0.1907, 0.1907), 0.05)


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    line = f"ACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
