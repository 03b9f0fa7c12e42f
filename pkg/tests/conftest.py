import numpy as np
import pytest

from ktreelearn import JointTable, VarSet

ACCEPTANCE_LINES: list[str] = []


def random_table(seed, cards, concentration=1.0) -> JointTable:
    rng = np.random.default_rng(seed)
    size = int(np.prod(cards))
    return JointTable(VarSet(tuple(cards)), rng.dirichlet(np.full(size, concentration)))


def copies(n: int) -> JointTable:
    """n binary variables that are all copies of one fair bit."""
    arr = np.zeros((2,) * n)
    arr[(0,) * n] = arr[(1,) * n] = 0.5
    return JointTable.from_array(arr)


def coins(n: int) -> JointTable:
    return JointTable(VarSet((2,) * n), np.full(2**n, 0.5**n))


@pytest.fixture
def report():
    """Collects one pass/fail line per acceptance criterion for the terminal summary."""

    def add(name: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        print(ACCEPTANCE_LINES[-1])

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
