import sys

import numpy as np
import pytest

from hilbex import metrics


def random_points(metric, count, dim, rng):
    """Points valid for ``metric``; simplex points include exact zeros."""
    if metric.requires_simplex:
        x = rng.random((count, dim))
        x[rng.random((count, dim)) < 0.15] = 0.0
        x[np.all(x == 0, axis=1), 0] = 1.0
        return x / x.sum(axis=1, keepdims=True)
    if metric.requires_nonzero:
        return rng.standard_normal((count, dim))
    return rng.uniform(-1.0, 1.0, (count, dim))


PROPER_METRICS = [metrics.EUC, metrics.JSD, metrics.TRI, metrics.COS_SQRT, metrics.SQRT_MAN, metrics.MAN]
HILBERT_METRICS = [metrics.EUC, metrics.JSD, metrics.TRI, metrics.COS_SQRT, metrics.SQRT_MAN]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, headline, _ in sorted(lines, key=lambda x: x[0]):
        terminalreporter.write_line(f"CRITERION {number}: {'PASS' if passed else 'FAIL'} -- {headline}")
