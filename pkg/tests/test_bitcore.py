import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_bool_multiply, random_matrix
from drnet.bitcore import BitMatrix, BitVector, bool_multiply, negate, nor_layer
from drnet.errors import DimensionError


def all_matrices(rows, cols):
    for bits in range(1 << (rows * cols)):
        words = []
        for r in range(rows):
            words.append((bits >> (r * cols)) & ((1 << cols) - 1))
        yield BitMatrix(rows, cols, words)


class TestNegate:
    def test_single_cell(self):
        assert negate(BitMatrix.from_bits([[1]])).to_lists() == [[0]]

    def test_elementwise(self):
        m = BitMatrix.from_bits([[1, 0, 1], [0, 0, 0]])
        assert negate(m).to_lists() == [[0, 1, 0], [1, 1, 1]]

    def test_involution(self, rng):
        for _ in range(50):
            m = random_matrix(rng, rng.randrange(1, 9), rng.randrange(1, 9))
            assert negate(negate(m)) == m

    def test_padding_stays_zero(self, rng):
        for _ in range(50):
            cols = rng.randrange(1, 70)
            m = random_matrix(rng, 3, cols)
            n = negate(m)
            for w in n.words:
                assert w >> cols == 0


class TestBoolMultiply:
    def test_identity(self, rng):
        ident = BitMatrix.from_bits([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        w = random_matrix(rng, 3, 2)
        assert bool_multiply(ident, w) == w

    def test_no_overlap(self):
        a = BitMatrix.from_bits([[1, 0]])
        w = BitMatrix.from_bits([[0], [1]])
        assert bool_multiply(a, w).to_lists() == [[0]]

    def test_random_8x8_against_oracle(self, rng):
        for _ in range(60):
            a = random_matrix(rng, 8, 8)
            w = random_matrix(rng, 8, 8)
            assert bool_multiply(a, w) == naive_bool_multiply(a, w)

    def test_exhaustive_tiny(self):
        for a in all_matrices(2, 2):
            for w in all_matrices(2, 2):
                assert bool_multiply(a, w) == naive_bool_multiply(a, w)

    def test_random_dims_against_oracle(self, rng):
        for _ in range(40):
            n, m, k = (rng.randrange(1, 7) for _ in range(3))
            a = random_matrix(rng, n, m)
            w = random_matrix(rng, m, k)
            assert bool_multiply(a, w) == naive_bool_multiply(a, w)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            bool_multiply(BitMatrix.zeros(2, 3), BitMatrix.zeros(4, 2))


class TestNorLayer:
    def test_zero_weight_column_gives_zero(self, rng):
        a = random_matrix(rng, 5, 4)
        w = BitMatrix.zeros(4, 3)
        w.set(0, 1, 1)
        out = nor_layer(a, w)
        assert all(out.get(r, 0) == 0 for r in range(5))
        assert all(out.get(r, 2) == 0 for r in range(5))

    def test_single_conjunction_node(self):
        # node selects literals 0 and 1; input row has both set -> AND true
        w = BitMatrix.from_bits([[1], [1], [0], [0]])
        a = BitMatrix.from_bits([[1, 1, 0, 0]])
        assert negate(nor_layer(a, w)).get(0, 0) == 1
        a2 = BitMatrix.from_bits([[1, 0, 0, 0]])
        assert negate(nor_layer(a2, w)).get(0, 0) == 0

    def test_de_morgan_conjunction_oracle(self, rng):
        # negate(nor_layer(a, w))[i][j] must be the AND over w's selected rows
        for _ in range(30):
            a = random_matrix(rng, 6, 5)
            w = random_matrix(rng, 5, 4)
            got = negate(nor_layer(a, w))
            for i in range(6):
                for j in range(4):
                    sel = [a.get(i, t) for t in range(5) if w.get(t, j)]
                    assert got.get(i, j) == int(all(sel))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            nor_layer(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 2))


@given(st.integers(1, 8), st.integers(1, 8), st.data())
@settings(max_examples=60, deadline=None)
def test_negate_involution_property(rows, cols, data):
    words = [data.draw(st.integers(0, (1 << cols) - 1)) for _ in range(rows)]
    m = BitMatrix(rows, cols, words)
    assert negate(negate(m)) == m


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.data())
@settings(max_examples=60, deadline=None)
def test_multiply_matches_oracle_property(n, m, k, data):
    a = BitMatrix(n, m, [data.draw(st.integers(0, (1 << m) - 1)) for _ in range(n)])
    w = BitMatrix(m, k, [data.draw(st.integers(0, (1 << k) - 1)) for _ in range(m)])
    assert bool_multiply(a, w) == naive_bool_multiply(a, w)


class TestBitVector:
    def test_round_trip(self):
        v = BitVector.from_ints([1, 0, 1, 1])
        assert v.to_list() == [1, 0, 1, 1]
        assert v.popcount() == 3
        assert v.fraction() == 0.75

    def test_get_bounds(self):
        v = BitVector(3)
        with pytest.raises(IndexError):
            v.get(3)

    def test_transpose_round_trip(self, rng):
        m = random_matrix(rng, 7, 11)
        assert m.transpose().transpose() == m
