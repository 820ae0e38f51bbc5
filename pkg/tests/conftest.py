import numpy as np
import pytest

from gsvdnoma.model import MeanSpec, SystemConfig, build_mean_matrices

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def zero_means():
    def make(M1, M2, N, **kw):
        cfg = SystemConfig(M1, M2, N, **kw)
        return cfg, build_mean_matrices(MeanSpec(), cfg)
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
