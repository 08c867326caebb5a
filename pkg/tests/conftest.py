import numpy as np
import pytest

from gapless_mec.core import FragmentMatrix
from gapless_mec.swc import Precision

# Precision that skips exact delegation so the sampling and DP paths run.
FORCED = Precision(small_r_cutoff=0, center_candidates=1)


def fm(*lines: str) -> FragmentMatrix:
    return FragmentMatrix.from_strings(list(lines))


def random_matrix(rng: np.random.Generator, n: int, m: int, swc: bool = False) -> FragmentMatrix:
    rows = []
    for _ in range(n):
        s = 1 if swc else int(rng.integers(1, m + 1))
        e = int(rng.integers(s, m + 1))
        bits = "".join(rng.choice(["0", "1"], size=e - s + 1))
        rows.append((s, bits))
    return FragmentMatrix.from_intervals(m, rows)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
