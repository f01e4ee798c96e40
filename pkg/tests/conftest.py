import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from everett import _kernels
from everett.branching import Coefficients, class_table, run_sequence

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger numba compilation once so timed sections measure steady state."""
    c = Coefficients.from_measures([0.2, 0.3, 0.5])
    class_table(c, 5)
    run_sequence(c, 3).grouped_measures()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section(f"acceptance criteria ({_kernels.backend()} kernels)")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
