import random

import pytest

from drnet.bitcore import BitMatrix


def random_matrix(rng: random.Random, rows: int, cols: int) -> BitMatrix:
    return BitMatrix(rows, cols, [rng.getrandbits(cols) for _ in range(rows)])


def naive_bool_multiply(a: BitMatrix, w: BitMatrix) -> BitMatrix:
    """Triple-loop oracle, independent of the packed kernel."""
    out = BitMatrix.zeros(a.rows, w.cols)
    for i in range(a.rows):
        for j in range(w.cols):
            v = 0
            for t in range(a.cols):
                if a.get(i, t) and w.get(t, j):
                    v = 1
                    break
            out.set(i, j, v)
    return out


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
