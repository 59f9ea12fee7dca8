"""Artificial concept generation and dataset utilities.

Concepts are produced by sampling a funnel network, nudging it with two
labeled examples, and labeling the complete input space; candidates are
rejected until the positive ratio is balanced and the minimized DNF stays
small.  Minimization is Quine-McCluskey prime implicants followed by a
greedy cover.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .bitcore import BitVector
from .data import Attribute, OneHotDataset, Schema, dataset_from_rows, load_nominal_csv
from .errors import GenerationError, ValidationError
from .network import NetworkConfig, RuleNetwork, RuleSet, initialize
from .training import GreedyTrainer, _dataset_columns

__all__ = [
    "Schema",
    "OneHotDataset",
    "Attribute",
    "load_nominal_csv",
    "generate_inputs",
    "generate_concept",
    "ConceptResult",
    "minimize_dnf",
    "truth_table",
    "tic_tac_toe_dataset",
    "UCI_URLS",
    "fetch_uci",
]

MAX_ENUM_VARS = 20
MAX_MINIMIZE_VARS = 12

GENERATOR_HIDDEN = (32, 16, 8, 4, 2)
GENERATOR_RULE_LENGTH = 3.0
GENERATOR_INIT_PROBABILITY = 0.125
BALANCE_LOW, BALANCE_HIGH = 0.20, 0.80
MAX_CONCEPT_RULES = 20


def default_names(n_vars: int) -> List[str]:
    if n_vars <= 26:
        return list(string.ascii_lowercase[:n_vars])
    return [f"v{i}" for i in range(n_vars)]


def generate_inputs(n_vars: int = 10,
                    names: Sequence[str] | None = None) -> OneHotDataset:
    """All 2^n assignments of n boolean variables, one-hot encoded.

    Variable i follows bit i of the row index; each variable contributes
    a positive and a negated literal column.  The result carries no
    labels.
    """
    if not 1 <= n_vars <= MAX_ENUM_VARS:
        raise ValidationError(f"n_vars must be in 1..{MAX_ENUM_VARS}")
    schema = Schema.bool_vars(names or default_names(n_vars))
    if schema.n_attributes != n_vars:
        raise ValidationError("names length does not match n_vars")
    rows = []
    for r in range(1 << n_vars):
        # value index 0 is "true", 1 is "false"
        rows.append([0 if (r >> i) & 1 else 1 for i in range(n_vars)])
    return dataset_from_rows(schema, rows, None, provenance=f"enumeration:{n_vars}")


@dataclass(frozen=True)
class ConceptResult:
    network: RuleNetwork
    dataset: OneHotDataset
    seed_requested: int
    seed_accepted: int
    attempts: int
    pos_ratio: float
    rule_count: int

    def metadata(self) -> Dict:
        return {
            "seed": self.seed_requested,
            "seed_accepted": self.seed_accepted,
            "attempts": self.attempts,
            "pos_ratio": self.pos_ratio,
            "rule_count": self.rule_count,
            "positive_class": "positive",
        }


def generate_concept(seed: int, n_vars: int = 10,
                     retry_budget: int = 1000) -> ConceptResult:
    """Sample one labeled concept dataset.

    Repeats with seed+1, seed+2, ... until a candidate has a positive
    ratio inside the balance band and a minimized DNF of at most 20
    rules.  The candidate network is initialized from the seed and then
    greedily fitted to two distinct random examples, the first labeled
    positive, the second negative.
    """
    inputs = generate_inputs(n_vars)
    cols = _dataset_columns(inputs.x)
    n_rows = inputs.n_rows
    config = NetworkConfig(
        hidden_sizes=GENERATOR_HIDDEN,
        avg_rule_length=GENERATOR_RULE_LENGTH,
        init_probability=GENERATOR_INIT_PROBABILITY,
    )
    for attempt in range(retry_budget):
        cur_seed = seed + attempt
        rng = random.Random(cur_seed)
        net = initialize(config.with_seed(cur_seed), inputs.schema, rng)
        pos_idx, neg_idx = rng.sample(range(n_rows), 2)

        trainer = GreedyTrainer(net)
        pair_cols = []
        for col in cols:
            v = (col >> pos_idx) & 1
            v |= ((col >> neg_idx) & 1) << 1
            pair_cols.append(v)
        trainer.optimize_batch(pair_cols, 0b01, 2, None)

        labeled = trainer.to_network()
        y = labeled.predict(inputs.x)
        ratio = y.fraction()
        if not BALANCE_LOW <= ratio <= BALANCE_HIGH:
            continue
        rules = minimize_dnf(y, n_vars, names=[a.name for a in inputs.schema.attributes])
        if len(rules) > MAX_CONCEPT_RULES:
            continue
        dataset = OneHotDataset(inputs.schema, inputs.x, y,
                                provenance=f"generated:seed={seed}")
        return ConceptResult(labeled, dataset, seed, cur_seed, attempt + 1,
                             ratio, len(rules))
    raise GenerationError(
        f"no acceptable concept within {retry_budget} reseeds from seed {seed}"
    )


# ---------------------------------------------------------------------------
# Quine-McCluskey minimization

def minimize_dnf(labels, n_vars: int,
                 names: Sequence[str] | None = None) -> RuleSet:
    """Two-level minimization of a complete truth table.

    ``labels`` holds one bit per assignment, ordered by row index with
    variable i on bit i.  Prime implicants come from the classic merging
    passes; cover selection takes essential primes first and then greedily
    the prime covering the most uncovered minterms.  The result evaluates
    identically to the input table.
    """
    if n_vars < 1 or n_vars > MAX_MINIMIZE_VARS:
        raise ValidationError(f"n_vars must be in 1..{MAX_MINIMIZE_VARS}")
    size = 1 << n_vars
    if isinstance(labels, BitVector):
        if len(labels) != size:
            raise ValidationError(
                f"need all {size} labels, got {len(labels)} (partial table)"
            )
        bits = labels.bits
    else:
        seq = list(labels)
        if len(seq) != size:
            raise ValidationError(
                f"need all {size} labels, got {len(seq)} (partial table)"
            )
        bits = 0
        for i, v in enumerate(seq):
            if v:
                bits |= 1 << i

    schema = Schema.bool_vars(names or default_names(n_vars))
    on = [m for m in range(size) if (bits >> m) & 1]
    if not on:
        return RuleSet([], schema)

    primes = _prime_implicants(on, n_vars)
    chosen = _greedy_cover(primes, on, n_vars)

    rules = []
    for value, dc in chosen:
        lits = []
        for i in range(n_vars):
            if not (dc >> i) & 1:
                lits.append((i, 0 if (value >> i) & 1 else 1))
        rules.append(frozenset(lits))
    return RuleSet(rules, schema)


def _prime_implicants(on: Sequence[int], n_vars: int) -> List[Tuple[int, int]]:
    """Implicants as (value, dont_care_mask) pairs."""
    groups: Dict[int, set] = {}
    for m in on:
        groups.setdefault(m.bit_count(), set()).add((m, 0))

    primes = set()
    while groups:
        used = set()
        nxt: Dict[int, set] = {}
        keys = sorted(groups)
        for k in keys:
            upper = groups.get(k + 1, ())
            for a in groups[k]:
                av, adc = a
                for b in upper:
                    if adc != b[1]:
                        continue
                    diff = av ^ b[0]
                    if diff.bit_count() == 1:
                        merged = (av & ~diff, adc | diff)
                        nxt.setdefault((av & ~diff).bit_count(), set()).add(merged)
                        used.add(a)
                        used.add(b)
        for group in groups.values():
            primes.update(c for c in group if c not in used)
        groups = nxt
    return sorted(primes)


def _cover_mask(cube: Tuple[int, int], on_index: Dict[int, int]) -> int:
    value, dc = cube
    covered = 0
    free = [1 << i for i in range(dc.bit_length()) if (dc >> i) & 1]
    for combo in range(1 << len(free)):
        m = value
        for bi, bit in enumerate(free):
            if (combo >> bi) & 1:
                m |= bit
        pos = on_index.get(m)
        if pos is not None:
            covered |= 1 << pos
    return covered


def _greedy_cover(primes: List[Tuple[int, int]], on: Sequence[int],
                  n_vars: int) -> List[Tuple[int, int]]:
    on_index = {m: i for i, m in enumerate(on)}
    full = (1 << len(on)) - 1
    masks = [_cover_mask(p, on_index) for p in primes]

    chosen: List[int] = []
    covered = 0
    # essential primes: minterms covered by exactly one prime
    for i in range(len(on)):
        holders = [pi for pi, m in enumerate(masks) if (m >> i) & 1]
        if len(holders) == 1 and holders[0] not in chosen:
            chosen.append(holders[0])
            covered |= masks[holders[0]]
    while covered != full:
        best, best_gain = None, 0
        for pi, m in enumerate(masks):
            gain = (m & ~covered).bit_count()
            if gain > best_gain:
                best, best_gain = pi, gain
        chosen.append(best)
        covered |= masks[best]
    return [primes[i] for i in sorted(set(chosen))]


def truth_table(rs: RuleSet, n_vars: int) -> BitVector:
    """Evaluate a rule set over the full boolean assignment space."""
    bits = 0
    for r in range(1 << n_vars):
        row = [0 if (r >> i) & 1 else 1 for i in range(n_vars)]
        if rs.covers(row):
            bits |= 1 << r
    return BitVector(1 << n_vars, bits)


# ---------------------------------------------------------------------------
# real-world datasets

TTT_CELLS = [
    "top-left", "top-middle", "top-right",
    "middle-left", "middle-middle", "middle-right",
    "bottom-left", "bottom-middle", "bottom-right",
]
_TTT_LINES = [
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
]


def tic_tac_toe_dataset() -> OneHotDataset:
    """The classic endgame benchmark, reconstructed exactly.

    Enumerates every board reachable at the end of a game with x moving
    first (win for either side or a full board) and labels it positive
    when x holds a line.  Yields the familiar 958 rows with 65.34%
    positives.
    """
    terminal = set()

    def wins(board: Tuple[str, ...], mark: str) -> bool:
        return any(all(board[c] == mark for c in line) for line in _TTT_LINES)

    seen = set()

    def play(board: Tuple[str, ...], mover: str):
        if board in seen:
            return
        seen.add(board)
        for c in range(9):
            if board[c] != "b":
                continue
            nxt = list(board)
            nxt[c] = mover
            nxt = tuple(nxt)
            if wins(nxt, mover) or "b" not in nxt:
                terminal.add(nxt)
            else:
                play(nxt, "o" if mover == "x" else "x")

    play(("b",) * 9, "x")

    schema = Schema([Attribute(name, ("b", "o", "x")) for name in TTT_CELLS])
    boards = sorted(terminal)
    value_rows = [[("b", "o", "x").index(c) for c in board] for board in boards]
    labels = [1 if wins(board, "x") else 0 for board in boards]
    return dataset_from_rows(schema, value_rows, labels, provenance="tic-tac-toe")


UCI_URLS = {
    "tic-tac-toe": "https://archive.ics.uci.edu/ml/machine-learning-databases/tic-tac-toe/tic-tac-toe.data",
    "vote": "https://archive.ics.uci.edu/ml/machine-learning-databases/voting-records/house-votes-84.data",
    "car-evaluation": "https://archive.ics.uci.edu/ml/machine-learning-databases/car/car.data",
    "kr-vs-kp": "https://archive.ics.uci.edu/ml/machine-learning-databases/chess/king-rook-vs-king-pawn/kr-vs-kp.data",
    "mushroom": "https://archive.ics.uci.edu/ml/machine-learning-databases/mushroom/agaricus-lepiota.data",
    "connect-4": "https://archive.ics.uci.edu/ml/machine-learning-databases/connect-4/connect-4.data",
}

# headerless UCI files need column names; class column position per set
UCI_COLUMNS = {
    "tic-tac-toe": (TTT_CELLS + ["class"], -1),
    "vote": (["class"] + [f"issue{i}" for i in range(1, 17)], 0),
    "car-evaluation": (["buying", "maint", "doors", "persons", "lug_boot",
                        "safety", "class"], -1),
    "kr-vs-kp": ([f"f{i}" for i in range(1, 37)] + ["class"], -1),
    "mushroom": (["class"] + [f"f{i}" for i in range(1, 23)], 0),
    "connect-4": ([f"c{i}" for i in range(1, 43)] + ["class"], -1),
}


def fetch_uci(name: str, dest_dir) -> str:
    """Download one of the six benchmark files and store it with a header
    row in the dialect ``load_nominal_csv`` reads.  Needs network access;
    tests only use local copies.
    """
    import csv as _csv
    import io
    import os
    import urllib.request

    if name not in UCI_URLS:
        raise ValidationError(f"unknown dataset {name!r}; choices: {sorted(UCI_URLS)}")
    header, _ = UCI_COLUMNS[name]
    with urllib.request.urlopen(UCI_URLS[name]) as resp:
        raw = resp.read().decode("utf-8")
    rows = [r for r in _csv.reader(io.StringIO(raw)) if r]
    os.makedirs(dest_dir, exist_ok=True)
    path = os.path.join(dest_dir, f"{name}.csv")
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def load_uci(name: str, path) -> OneHotDataset:
    """Load a stored benchmark file, applying the set's class column."""
    if name not in UCI_COLUMNS:
        raise ValidationError(f"unknown dataset {name!r}")
    _, class_col = UCI_COLUMNS[name]
    return load_nominal_csv(path, class_column=class_col)


def write_concept_files(result: ConceptResult, data_dir) -> Tuple[str, str]:
    """CSV plus sidecar metadata for one generated concept."""
    import os

    os.makedirs(data_dir, exist_ok=True)
    stem = f"gen_{result.seed_requested:04d}"
    csv_path = os.path.join(data_dir, f"{stem}.csv")
    meta_path = os.path.join(data_dir, f"{stem}.meta.json")
    result.dataset.to_csv(csv_path)
    with open(meta_path, "w") as fh:
        json.dump(result.metadata(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return csv_path, meta_path
