import numpy as np
import pytest
from hypothesis import settings, strategies as st

from toricquot.actions import TorusAction
from toricquot.errors import InvalidAction
from toricquot.lattice import IntMatrix

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_action(rng, kmax=3, nmax=4, entry=3, f=0):
    """Seeded random valid torus action (rank k, no zero rows)."""
    while True:
        k = int(rng.integers(1, kmax + 1))
        n = int(rng.integers(k, nmax + 1))
        W = rng.integers(-entry, entry + 1, size=(k, n)).tolist()
        try:
            return TorusAction(IntMatrix.from_rows(W, n), f)
        except InvalidAction:
            continue


@st.composite
def int_matrices(draw, max_rows=4, max_cols=4, entry=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(st.integers(-entry, entry), min_size=c, max_size=c), min_size=r, max_size=r))
    return IntMatrix.from_rows(rows, c)


@st.composite
def torus_actions(draw, kmax=3, nmax=4, entry=3, fmax=1):
    k = draw(st.integers(1, kmax))
    n = draw(st.integers(k, nmax))
    f = draw(st.integers(0, fmax))
    rows = draw(st.lists(st.lists(st.integers(-entry, entry), min_size=n, max_size=n), min_size=k, max_size=k))
    try:
        return TorusAction(IntMatrix.from_rows(rows, n), f)
    except InvalidAction:
        from hypothesis import reject
        reject()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def teardrop():
    return TorusAction.from_weights([[1, 2]])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
