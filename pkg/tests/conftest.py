import math

import pytest

from entropower.grid import density_from_amplitude, normalize
from entropower.infoscan import information_scan
from entropower.states import cauchy_pltwp, gaussian_density
from entropower.transform import fourier_conjugate

ACCEPTANCE_RESULTS = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {detail}"
    ACCEPTANCE_RESULTS[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])


@pytest.fixture(scope="session")
def cauchy():
    return cauchy_pltwp(1.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def cauchy_momentum(cauchy):
    return fourier_conjugate(cauchy.psi, 1.0)


@pytest.fixture(scope="session")
def cauchy_density(cauchy):
    return normalize(density_from_amplitude(cauchy.psi))


@pytest.fixture(scope="session")
def cauchy_scan(cauchy_density):
    return information_scan(cauchy_density)


@pytest.fixture(scope="session")
def gauss():
    return gaussian_density(1.0)


@pytest.fixture(scope="session")
def gauss_scan(gauss):
    return information_scan(gauss)


LOG2E = math.log2(math.e)
