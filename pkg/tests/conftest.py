from __future__ import annotations

import numpy as np
import pytest

from ffdescent import _kernels


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    _kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
