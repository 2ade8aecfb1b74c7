import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cpzono.oracle import random_cpz

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20200817)


def random_instance(rng, n=None, p=None, h=None, m=None, q=None):
    """Random regular CPZ with a planted witness, within the acceptance bounds."""
    n = rng.integers(1, 5) if n is None else n
    p = rng.integers(1, 5) if p is None else p
    h = rng.integers(1, 6) if h is None else h
    m = rng.integers(0, 3) if m is None else m
    q = rng.integers(1, 5) if q is None else q
    return random_cpz(rng, n, p, h, m, q)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.ok, self.detail = False, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None and not self.detail:
            self.detail = f"{exc_type.__name__}: {exc}"
        line = f"{'PASS' if self.ok and exc_type is None else 'FAIL'} [{self.number}] {self.title}: {self.detail}"
        ACCEPTANCE.append(line)
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
