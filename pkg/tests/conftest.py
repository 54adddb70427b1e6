import functools
from pathlib import Path

import numpy as np
import pytest

from starlattice.counting import count_bruteforce, count_dp
from starlattice.model import GeometryParams, LatticeEncoding, parse_encoding
from starlattice.validity import is_valid

FIXTURES = Path(__file__).parent / "fixtures"

# sampling grid and geometry frozen for the parabola profile fixtures
DEMO_ROWS = 56
DEMO_GEOM = GeometryParams(20.0, 20.0, 20.0)


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def valid_enc():
    return parse_encoding(fixture_text("valid_10x4.lat"))


@pytest.fixture(scope="session")
def frustrated_enc():
    return parse_encoding(fixture_text("frustrated_10x4.lat"))


def joint_table(name: str) -> list[list[str]]:
    return [line.split("\t") for line in fixture_text(name).splitlines() if line.strip()]


@functools.lru_cache(maxsize=None)
def brute(a: int, b: int) -> int:
    return count_bruteforce(a, b).valid_count


@functools.lru_cache(maxsize=None)
def dp(a: int, b: int) -> int:
    return count_dp(a, b).valid_count


def random_valid(rng: np.random.Generator, rows_a: int, cols_b: int) -> LatticeEncoding:
    """Random valid encoding built one column at a time.

    Each new column is drawn from the columns that keep the prefix valid;
    copying the previous column always qualifies, so the draw never stalls.
    """
    from starlattice.counting import _valid_mask

    states = ((np.arange(1 << rows_a)[:, None] >> np.arange(rows_a)) & 1).astype(np.int8)
    bits = states[rng.integers(len(states))][:, None]
    for _ in range(1, cols_b):
        stack = np.concatenate([np.broadcast_to(bits, (len(states),) + bits.shape), states[:, :, None]], axis=2)
        ok = np.flatnonzero(_valid_mask(stack))
        bits = stack[ok[rng.integers(len(ok))]]
    return LatticeEncoding.from_array(bits)


# (criterion number, "PASS/FAIL criterion N: ...") lines from test_acceptance.py
ACCEPTANCE_LINES: list[tuple[int, str]] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
