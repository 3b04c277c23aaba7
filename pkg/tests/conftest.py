import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unit(rng, size=3, complex_=False):
    v = rng.normal(size=size) + (1j * rng.normal(size=size) if complex_ else 0)
    return v / np.linalg.norm(v)


def transverse_pol(rng, k, complex_=False):
    """Random unit vector orthogonal to k."""
    v = rng.normal(size=3) + (1j * rng.normal(size=3) if complex_ else 0)
    kh = k / np.linalg.norm(k)
    v = v - kh * (kh @ v)
    return v / np.linalg.norm(v)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
