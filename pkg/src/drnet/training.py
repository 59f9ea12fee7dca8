"""Greedy mini-batch flip training.

The trainer keeps weights column-major (one source-bitmask int per target
node) and activations column-packed (one int per node, bit r = row r of
the batch), so a candidate flip is scored by recomputing the single
affected node and propagating forward only while something actually
changes.  Scores are integer match counts; strict integer comparison
implements the strict-improvement rule without float traps.

Scan order over candidate flips is layer, then source node, then target
node; among equally improving flips the first in scan order wins.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from .bitcore import BitMatrix, BitVector
from .errors import ValidationError
from .network import RuleNetwork


@dataclass(frozen=True)
class TrainParams:
    n_epochs: int = 5
    batch_size: int = 50
    max_flips: Optional[int] = None  # None = unbounded
    seed: int = 0

    def __post_init__(self):
        if self.n_epochs < 1:
            raise ValidationError("n_epochs must be >= 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.max_flips is not None and self.max_flips < 0:
            raise ValidationError("max_flips must be >= 0 or None")


@dataclass(frozen=True)
class Flip:
    """Toggle weight (layer, source, target); companions are same-target
    first-layer weights toggled off to keep one literal per attribute."""

    layer: int
    source: int
    target: int
    companions: Tuple[int, ...] = ()


@dataclass(frozen=True)
class TraceRecord:
    epoch: int
    batch: int
    accuracy: float


def accuracy(y_true: BitVector, y_pred: BitVector) -> float:
    if len(y_true) != len(y_pred):
        raise ValidationError(
            f"length mismatch: {len(y_true)} vs {len(y_pred)}"
        )
    if len(y_true) == 0:
        raise ValidationError("accuracy of empty vectors")
    mask = (1 << len(y_true)) - 1
    return (~(y_true.bits ^ y_pred.bits) & mask).bit_count() / len(y_true)


class GreedyTrainer:
    """Mutable training state for one network.

    The public entry points ``fit`` and ``optimize_coefs`` wrap this; the
    class itself is exposed so tests and tooling can inspect flip
    histories.
    """

    def __init__(self, net: RuleNetwork):
        self.schema = net.schema
        self.hidden_sizes = net.hidden_sizes
        self.config = net.config
        self.sizes = net.sizes
        self.output_negated = net.output_negated
        # wcols[i][k] = bitmask of sources feeding node k of layer i+1
        self.wcols: List[List[int]] = [w.transpose().words for w in net.weights]
        self._attr_of = self.schema.col_attr
        self._attr_cols = [list(self.schema.attr_columns(a))
                           for a in range(self.schema.n_attributes)]

    # -- weight state ------------------------------------------------------

    def snapshot(self) -> List[List[int]]:
        return [list(layer) for layer in self.wcols]

    def restore(self, snap: List[List[int]]) -> None:
        self.wcols = [list(layer) for layer in snap]

    def to_network(self) -> RuleNetwork:
        weights = []
        for i, cols in enumerate(self.wcols):
            rows = [0] * self.sizes[i]
            for k, mask in enumerate(cols):
                while mask:
                    low = mask & -mask
                    rows[low.bit_length() - 1] |= 1 << k
                    mask ^= low
            weights.append(BitMatrix(self.sizes[i], self.sizes[i + 1], rows))
        return RuleNetwork(self.schema, self.hidden_sizes, weights, self.config)

    def apply_flip(self, flip: Flip) -> None:
        mask = 1 << flip.source
        for c in flip.companions:
            mask |= 1 << c
        self.wcols[flip.layer][flip.target] ^= mask

    # flips toggle bits, so applying one twice restores the exact state
    revert_flip = apply_flip

    def enumerate_flips(self) -> Iterator[Flip]:
        for i, cols in enumerate(self.wcols):
            for j in range(self.sizes[i]):
                jbit = 1 << j
                for k, colmask in enumerate(cols):
                    companions: Tuple[int, ...] = ()
                    if i == 0 and not (colmask & jbit):
                        # turning a literal on: clear any sibling literal of
                        # the same attribute already in this conjunction
                        sibs = tuple(
                            c for c in self._attr_cols[self._attr_of[j]]
                            if c != j and (colmask >> c) & 1
                        )
                        companions = sibs
                    yield Flip(i, j, k, companions)

    # -- forward evaluation ------------------------------------------------

    def forward(self, in_cols: Sequence[int], nrows: int) -> List[List[int]]:
        """Full forward pass; returns activations per layer (column-packed)."""
        mask = (1 << nrows) - 1
        acts = [list(in_cols)]
        cur = in_cols
        for layer in self.wcols:
            not_cur = [a ^ mask for a in cur]
            nxt = []
            for colmask in layer:
                v = 0
                while colmask:
                    low = colmask & -colmask
                    v |= not_cur[low.bit_length() - 1]
                    colmask ^= low
                nxt.append(v)
            acts.append(nxt)
            cur = nxt
        return acts

    def output_bits(self, acts: List[List[int]], nrows: int) -> int:
        out = acts[-1][0]
        if self.output_negated:
            out ^= (1 << nrows) - 1
        return out

    def matches_on(self, in_cols: Sequence[int], y: int, nrows: int) -> int:
        acts = self.forward(in_cols, nrows)
        out = self.output_bits(acts, nrows)
        return (~(out ^ y) & ((1 << nrows) - 1)).bit_count()

    # -- greedy batch optimization ------------------------------------------

    def optimize_batch(self, in_cols: Sequence[int], y: int, nrows: int,
                       max_flips: Optional[int]) -> List[Tuple[Flip, int]]:
        """Algorithm: rescan all flips, permanently apply the best strictly
        improving one, repeat until none improves or max_flips applied.
        Returns the applied flips with the match count reached after each.
        """
        if nrows == 0:
            raise ValidationError("empty batch")
        limit = math.inf if max_flips is None else max_flips
        rowmask = (1 << nrows) - 1

        acts = self.forward(in_cols, nrows)
        not_acts = [[a ^ rowmask for a in layer] for layer in acts]
        best = (~(self.output_bits(acts, nrows) ^ y) & rowmask).bit_count()

        history: List[Tuple[Flip, int]] = []
        while len(history) < limit:
            best_flip = None
            best_m = best
            for flip in self.enumerate_flips():
                m = self._trial_matches(flip, acts, not_acts, y, rowmask)
                if m is not None and m > best_m:
                    best_m = m
                    best_flip = flip
            if best_flip is None:
                break
            self.apply_flip(best_flip)
            acts = self.forward(in_cols, nrows)
            not_acts = [[a ^ rowmask for a in layer] for layer in acts]
            best = best_m
            history.append((best_flip, best_m))
        return history

    def _trial_matches(self, flip: Flip, acts, not_acts, y: int,
                       rowmask: int) -> Optional[int]:
        """Match count after a hypothetical flip, or None when the output
        provably cannot change (propagation died out)."""
        i = flip.layer
        colmask = self.wcols[i][flip.target] ^ (1 << flip.source)
        for c in flip.companions:
            colmask ^= 1 << c
        src_not = not_acts[i]
        v = 0
        while colmask:
            low = colmask & -colmask
            v |= src_not[low.bit_length() - 1]
            colmask ^= low
        if v == acts[i + 1][flip.target]:
            return None

        changed = {flip.target: v}
        layer = i + 1
        n_layers = len(self.wcols)
        while layer < n_layers:
            ckeys = 0
            for k in changed:
                ckeys |= 1 << k
            cached = acts[layer]
            cached_not = not_acts[layer]
            nxt_changed = {}
            for t, cm in enumerate(self.wcols[layer]):
                if not (cm & ckeys):
                    continue
                v = 0
                while cm:
                    low = cm & -cm
                    idx = low.bit_length() - 1
                    if idx in changed:
                        v |= changed[idx] ^ rowmask
                    else:
                        v |= cached_not[idx]
                    cm ^= low
                if v != acts[layer + 1][t]:
                    nxt_changed[t] = v
            if not nxt_changed:
                return None
            changed = nxt_changed
            layer += 1

        out = changed[0]
        if self.output_negated:
            out ^= rowmask
        return (~(out ^ y) & rowmask).bit_count()


# ---------------------------------------------------------------------------
# public operations

def _dataset_columns(x: BitMatrix) -> List[int]:
    return x.transpose().words


def _subset_columns(cols: Sequence[int], y: int,
                    indices: Sequence[int]) -> Tuple[List[int], int]:
    sub = []
    for col in cols:
        v = 0
        for pos, idx in enumerate(indices):
            if (col >> idx) & 1:
                v |= 1 << pos
        sub.append(v)
    yv = 0
    for pos, idx in enumerate(indices):
        if (y >> idx) & 1:
            yv |= 1 << pos
    return sub, yv


def enumerate_flips(net: RuleNetwork) -> List[Flip]:
    return list(GreedyTrainer(net).enumerate_flips())


def optimize_coefs(net: RuleNetwork, x: BitMatrix, y: BitVector,
                   max_flips: Optional[int] = None) -> RuleNetwork:
    """Greedy flip optimization of one batch; returns the updated network."""
    if x.rows != len(y):
        raise ValidationError(f"{x.rows} rows but {len(y)} labels")
    trainer = GreedyTrainer(net)
    trainer.optimize_batch(_dataset_columns(x), y.bits, x.rows, max_flips)
    return trainer.to_network()


def fit(net: RuleNetwork, x: BitMatrix, y: BitVector, params: TrainParams,
        rng: random.Random | None = None,
        trace: Optional[List[TraceRecord]] = None) -> RuleNetwork:
    """Mini-batch training loop.

    Tracks the best full-training-set accuracy seen after any mini-batch
    (starting from the untrained network), restores it after the last
    epoch, and finishes with one unbounded optimization pass over the
    complete training set.  When the number of rows is not divisible by
    the batch size, the final short batch is kept rather than dropped.
    """
    if x.rows == 0:
        raise ValidationError("empty training set")
    if x.rows != len(y):
        raise ValidationError(f"{x.rows} rows but {len(y)} labels")
    if rng is None:
        rng = random.Random(params.seed)

    trainer = GreedyTrainer(net)
    cols = _dataset_columns(x)
    n = x.rows
    best_m = trainer.matches_on(cols, y.bits, n)
    best_w = trainer.snapshot()

    order = list(range(n))
    for epoch in range(params.n_epochs):
        rng.shuffle(order)
        n_batches = (n + params.batch_size - 1) // params.batch_size
        for b in range(n_batches):
            idx = order[b * params.batch_size:(b + 1) * params.batch_size]
            bcols, by = _subset_columns(cols, y.bits, idx)
            trainer.optimize_batch(bcols, by, len(idx), params.max_flips)
            m = trainer.matches_on(cols, y.bits, n)
            if m > best_m:
                best_m = m
                best_w = trainer.snapshot()
            if trace is not None:
                trace.append(TraceRecord(epoch, b, m / n))

    trainer.restore(best_w)
    # the closing pass on the full set always runs unbounded
    trainer.optimize_batch(cols, y.bits, n, None)
    return trainer.to_network()
