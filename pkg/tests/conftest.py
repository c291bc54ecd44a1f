import numpy as np
import pytest

from infconv import _backend
from infconv.grid import make_grid


def naive_minplus(f, g):
    """Pure-Python min-plus oracle on 1-D arrays of equal odd length (cropped, origin-centred)."""
    n = len(f)
    c = (n - 1) // 2
    out = []
    for i in range(n):
        best = float("inf")
        for j in range(n):
            k = i - j + c
            if 0 <= k < n:
                best = min(best, f[j] + g[k])
        out.append(best)
    return np.array(out)


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


@pytest.fixture
def line():
    return make_grid(1, 6.0, 1025)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


#: (criterion number, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
