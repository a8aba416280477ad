import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def cgauss(gen, shape):
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2)


def random_unitary(gen, n):
    Q, R = np.linalg.qr(cgauss(gen, (n, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def gen():
    return np.random.default_rng(20240617)


# one line per acceptance criterion, echoed in the terminal summary
CRITERION_LINES: list[str] = []


def record_criterion(label: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {label}: {detail}"
    CRITERION_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
