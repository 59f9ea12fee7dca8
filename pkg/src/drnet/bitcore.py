"""Bit-packed boolean matrices and the kernels used by rule networks.

A BitMatrix stores one unbounded little-endian machine word per row
(Python int), bit ``c`` of row word ``r`` holding element (r, c).  Bits at
positions >= cols are kept zero at all times so that word-level popcount,
OR and AND shortcuts stay valid.

The three kernels are element-wise negation, the boolean matrix product
(OR of ANDs), and their composition ``nor_layer`` which is the single
step used to push activations through a rule network layer.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence

from .errors import DimensionError, ValidationError


class BitVector:
    """A fixed-length vector of bits packed into one int (bit i = element i)."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValidationError("BitVector length must be >= 0")
        self.n = n
        self.bits = bits & ((1 << n) - 1)

    @classmethod
    def from_ints(cls, values: Iterable[int]) -> "BitVector":
        bits = 0
        n = 0
        for v in values:
            if v:
                bits |= 1 << n
            n += 1
        return cls(n, bits)

    def get(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def popcount(self) -> int:
        return self.bits.bit_count()

    def fraction(self) -> float:
        if self.n == 0:
            raise ValidationError("fraction of empty vector")
        return self.popcount() / self.n

    def to_list(self) -> List[int]:
        return [(self.bits >> i) & 1 for i in range(self.n)]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self):
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"BitVector({self.n}, 0b{self.bits:0{max(self.n, 1)}b})"


class BitMatrix:
    """Dense boolean matrix, one packed word per row.

    Values are safe to read from several threads; mutate only through
    ``set`` and never concurrently.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: List[int] | None = None):
        if rows < 0 or cols < 0:
            raise ValidationError("matrix dimensions must be >= 0")
        self.rows = rows
        self.cols = cols
        if words is None:
            self.words = [0] * rows
        else:
            if len(words) != rows:
                raise DimensionError(f"expected {rows} row words, got {len(words)}")
            mask = (1 << cols) - 1
            self.words = [w & mask for w in words]

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]], cols: int | None = None) -> "BitMatrix":
        rows = len(bits)
        if cols is None:
            cols = len(bits[0]) if rows else 0
        words = []
        for r, row in enumerate(bits):
            if len(row) != cols:
                raise DimensionError(f"row {r} has {len(row)} entries, expected {cols}")
            w = 0
            for c, v in enumerate(row):
                if v:
                    w |= 1 << c
            words.append(w)
        return cls(rows, cols, words)

    def get(self, r: int, c: int) -> int:
        self._check(r, c)
        return (self.words[r] >> c) & 1

    def set(self, r: int, c: int, value: int) -> None:
        self._check(r, c)
        if value:
            self.words[r] |= 1 << c
        else:
            self.words[r] &= ~(1 << c)

    def _check(self, r: int, c: int) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r}, {c}) outside {self.rows}x{self.cols}")

    def row_word(self, r: int) -> int:
        return self.words[r]

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for r, w in enumerate(self.words):
            bit = 1 << r
            while w:
                low = w & -w
                out[low.bit_length() - 1] |= bit
                w ^= low
        return BitMatrix(self.cols, self.rows, out)

    def popcount(self) -> int:
        return sum(w.bit_count() for w in self.words)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, list(self.words))

    def to_lists(self) -> List[List[int]]:
        return [[(w >> c) & 1 for c in range(self.cols)] for w in self.words]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.words == other.words
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.words)))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def negate(a: BitMatrix) -> BitMatrix:
    """Element-wise complement; padding bits stay zero."""
    mask = (1 << a.cols) - 1
    return BitMatrix(a.rows, a.cols, [w ^ mask for w in a.words])


def bool_multiply(a: BitMatrix, w: BitMatrix) -> BitMatrix:
    """Boolean matrix product: out[i][j] = OR_t (a[i][t] AND w[t][j]).

    Computed against the transposed right factor so each output bit is a
    single word AND with early exit once any overlap is found.
    """
    if a.cols != w.rows:
        raise DimensionError(
            f"inner dimensions differ: {a.rows}x{a.cols} vs {w.rows}x{w.cols}"
        )
    wt = w.transpose().words
    out = []
    for row in a.words:
        bits = 0
        for j, col in enumerate(wt):
            if row & col:
                bits |= 1 << j
        out.append(bits)
    return BitMatrix(a.rows, w.cols, out)


def nor_layer(a: BitMatrix, w: BitMatrix) -> BitMatrix:
    """One network layer step: multiply the negated activations by the weights.

    The result holds the complement of a conjunction (callers negate where
    conjunctive semantics require the positive value) or a disjunction
    directly, depending on layer parity.
    """
    if a.cols != w.rows:
        raise DimensionError(
            f"activations {a.rows}x{a.cols} do not feed weights {w.rows}x{w.cols}"
        )
    return bool_multiply(negate(a), w)
