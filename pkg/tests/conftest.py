import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import tasteleak as tl  # noqa: E402

ACCEPTANCE_LINES: list[str] = []
SUITE_BUDGET_S = 30.0
_START = time.perf_counter()


@pytest.fixture(scope="session")
def table():
    return tl.load_population_table()


@pytest.fixture(scope="session")
def weights():
    return tl.load_weight_config()


@pytest.fixture(scope="session")
def joints(table, weights):
    """Exact joints for the deterministic programs and the default sigma grid."""
    out = {
        tl.PHENOTYPE_R38: tl.exact_joint(table, tl.PHENOTYPE_R38),
        tl.PHENOTYPE_R16: tl.exact_joint(table, tl.PHENOTYPE_R16),
        tl.LINEAR_SCORE: tl.exact_joint(table, tl.LINEAR_SCORE, weights),
    }
    for s in (0.1, 0.5, 1.0, 2.0, 5.0):
        out[(tl.NOISY_SCORE, s)] = tl.exact_joint(table, tl.NOISY_SCORE, weights, tl.NoiseSpec(s))
    return out


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def _elapsed():
    return time.perf_counter() - _START


def pytest_sessionfinish(session, exitstatus):
    # the runtime budget only means something for a full run
    if ACCEPTANCE_LINES and session.testscollected > 100 and _elapsed() > SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
        t = _elapsed()
        terminalreporter.write_line(
            f"C7 {'PASS' if t < SUITE_BUDGET_S else 'FAIL'}  suite runtime {t:.1f} s (budget {SUITE_BUDGET_S:g} s)")
