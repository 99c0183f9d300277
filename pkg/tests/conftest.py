import numpy as np
import pytest

from framesync import binary_channel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bsc01():
    return binary_channel(0.1, 0.1)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call":
                lines += [v for k, v in rep.user_properties if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
