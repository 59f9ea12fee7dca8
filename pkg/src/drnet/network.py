"""Rule-network model: configuration, initialization, prediction, rule
extraction, and a versioned text format.

A network with hidden sizes s1..sn alternates conjunctive and disjunctive
node semantics starting conjunctive, ending in a single output node.  All
layers are computed uniformly as a boolean multiply of the negated
activations with the layer weights; with an odd number of hidden layers
the output node is a disjunction and the raw result already has the
polarity of the target.  Even hidden counts make the output conjunctive
and the final activation is complemented once; the shipped presets all
use odd layouts.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, List, Sequence, Tuple

from .bitcore import BitMatrix, BitVector
from .data import Attribute, Schema
from .errors import (
    DimensionError,
    ParseError,
    TermBudgetError,
    UnsupportedVersionError,
    ValidationError,
)

MODEL_FORMAT = "drnet-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class NetworkConfig:
    """Hyperparameters governing structure and random initialization.

    avg_rule_length is the expected number of attributes drawn into each
    first-layer conjunction; init_probability drives every later hidden
    layer.  Single-hidden-layer networks therefore do not depend on
    init_probability at all.
    """

    hidden_sizes: Tuple[int, ...]
    avg_rule_length: float = 2.0
    init_probability: float = 0.05
    first_layer_conjunctive: bool = True
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(self.hidden_sizes))
        if not self.hidden_sizes:
            raise ValidationError("at least one hidden layer required")
        if any(s < 1 for s in self.hidden_sizes):
            raise ValidationError("hidden layer sizes must be >= 1")
        if self.avg_rule_length < 1:
            raise ValidationError("avg_rule_length must be >= 1")
        if not 0.0 <= self.init_probability <= 1.0:
            raise ValidationError("init_probability must lie in [0, 1]")
        if not self.first_layer_conjunctive:
            raise ValidationError("disjunctive-first networks are not supported")

    @property
    def n_hidden(self) -> int:
        return len(self.hidden_sizes)

    def with_seed(self, seed: int) -> "NetworkConfig":
        return replace(self, seed=seed)


def layer_sizes(config: NetworkConfig, input_size: int) -> List[int]:
    """Full size chain s0..s_{n+1} including input and the single output."""
    return [input_size, *config.hidden_sizes, 1]


def count_weights(config: NetworkConfig, input_size: int) -> int:
    sizes = layer_sizes(config, input_size)
    return sum(a * b for a, b in zip(sizes, sizes[1:]))


class RuleNetwork:
    """Layer weight matrices plus the schema mapping literals to columns.

    weights[i] has shape s_i x s_{i+1}; row j holds the outgoing weights
    of node j.  Instances are safe for concurrent prediction; training
    operates on its own copy.
    """

    def __init__(self, schema: Schema, hidden_sizes: Sequence[int],
                 weights: List[BitMatrix], config: NetworkConfig | None = None):
        self.schema = schema
        self.hidden_sizes = tuple(hidden_sizes)
        self.weights = weights
        self.config = config
        sizes = [schema.n_literals, *self.hidden_sizes, 1]
        if len(weights) != len(sizes) - 1:
            raise DimensionError(
                f"{len(weights)} weight matrices for {len(sizes) - 1} layers"
            )
        for i, w in enumerate(weights):
            if (w.rows, w.cols) != (sizes[i], sizes[i + 1]):
                raise DimensionError(
                    f"layer {i} weights are {w.rows}x{w.cols}, "
                    f"expected {sizes[i]}x{sizes[i + 1]}"
                )

    @property
    def input_size(self) -> int:
        return self.schema.n_literals

    @property
    def n_hidden(self) -> int:
        return len(self.hidden_sizes)

    @property
    def sizes(self) -> List[int]:
        return [self.input_size, *self.hidden_sizes, 1]

    @property
    def output_negated(self) -> bool:
        """True when the output layer is conjunctive (even hidden count)."""
        return self.n_hidden % 2 == 0

    def copy(self) -> "RuleNetwork":
        return RuleNetwork(self.schema, self.hidden_sizes,
                           [w.copy() for w in self.weights], self.config)

    def predict(self, x: BitMatrix) -> BitVector:
        """Forward pass over a batch of rows; returns one bit per row."""
        if x.cols != self.input_size:
            raise DimensionError(
                f"input has {x.cols} columns, network expects {self.input_size}"
            )
        n = x.rows
        mask = (1 << n) - 1
        # column-packed activations: one int per node, bit r = row r
        acts = x.transpose().words
        for w in self.weights:
            not_acts = [a ^ mask for a in acts]
            nxt = []
            for col in w.transpose().words:
                v = 0
                while col:
                    low = col & -col
                    v |= not_acts[low.bit_length() - 1]
                    col ^= low
                nxt.append(v)
            acts = nxt
        out = acts[0]
        if self.output_negated:
            out ^= mask
        return BitVector(n, out)

    def true_weight_fraction(self, layer: int) -> float:
        w = self.weights[layer]
        total = w.rows * w.cols
        return w.popcount() / total if total else 0.0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RuleNetwork)
            and self.schema == other.schema
            and self.hidden_sizes == other.hidden_sizes
            and self.weights == other.weights
        )

    def __repr__(self) -> str:
        return f"RuleNetwork(in={self.input_size}, hidden={list(self.hidden_sizes)})"


def initialize(config: NetworkConfig, schema: Schema,
               rng: random.Random | None = None) -> RuleNetwork:
    """Draw a fresh network.

    First layer: each attribute enters a conjunction with probability
    avg_rule_length / n_attributes, using one uniformly chosen value
    literal, so no conjunction ever holds two literals of one attribute.
    Remaining hidden layers are Bernoulli(init_probability); the last
    layer is all-true.  Afterwards every node with no outgoing true
    weight gets one, chosen uniformly (for input literals, only targets
    that keep the one-literal-per-attribute constraint are eligible).
    """
    if rng is None:
        rng = random.Random(config.seed)
    n_attrs = schema.n_attributes
    if config.avg_rule_length > n_attrs:
        raise ValidationError(
            f"avg_rule_length {config.avg_rule_length} exceeds "
            f"{n_attrs} attributes"
        )
    sizes = layer_sizes(config, schema.n_literals)
    n_layers = len(sizes) - 1
    p_attr = config.avg_rule_length / n_attrs

    weights = [BitMatrix.zeros(sizes[i], sizes[i + 1]) for i in range(n_layers)]

    w0 = weights[0]
    for k in range(sizes[1]):
        for ai in range(n_attrs):
            if rng.random() < p_attr:
                vals = schema.attributes[ai].values
                vi = rng.randrange(len(vals))
                w0.set(schema.column(ai, vi), k, 1)

    for i in range(1, n_layers - 1):
        w = weights[i]
        p = config.init_probability
        for j in range(sizes[i]):
            for k in range(sizes[i + 1]):
                if rng.random() < p:
                    w.set(j, k, 1)

    last = weights[n_layers - 1]
    for j in range(last.rows):
        last.set(j, 0, 1)

    _force_connectivity(weights, schema, rng)
    return RuleNetwork(schema, config.hidden_sizes, weights, config)


def _force_connectivity(weights: List[BitMatrix], schema: Schema,
                        rng: random.Random) -> None:
    for i, w in enumerate(weights):
        for j in range(w.rows):
            if w.row_word(j):
                continue
            if i == 0:
                attr = schema.col_attr[j]
                others = [c for c in schema.attr_columns(attr) if c != j]
                free = [k for k in range(w.cols)
                        if not any(w.get(c, k) for c in others)]
                if free:
                    w.set(j, rng.choice(free), 1)
                else:
                    # every conjunction already uses this attribute: swap one
                    k = rng.randrange(w.cols)
                    for c in others:
                        w.set(c, k, 0)
                    w.set(j, k, 1)
            else:
                w.set(j, rng.randrange(w.cols), 1)


# ---------------------------------------------------------------------------
# symbolic rule sets

Literal = Tuple[int, int]  # (attribute index, value index)


class RuleSet:
    """A disjunction of conjunctions of literals.

    Conjunctions are frozensets of (attribute, value) pairs; a rule fires
    on a row when the row takes every listed value.  Simplification keeps
    the set free of contradictions (two values of one attribute) and of
    conjunctions subsumed by a more general one.
    """

    def __init__(self, rules: Iterable[frozenset], schema: Schema | None = None):
        self.rules: Tuple[frozenset, ...] = tuple(
            sorted(set(rules), key=lambda r: (len(r), sorted(r)))
        )
        self.schema = schema

    def __len__(self) -> int:
        return len(self.rules)

    def __eq__(self, other) -> bool:
        return isinstance(other, RuleSet) and self.rules == other.rules

    def __iter__(self):
        return iter(self.rules)

    def covers(self, value_row: Sequence[int]) -> bool:
        for rule in self.rules:
            if all(value_row[a] == v for a, v in rule):
                return True
        return False

    def evaluate(self, x: BitMatrix, schema: Schema | None = None) -> BitVector:
        schema = schema or self.schema
        if schema is None:
            raise ValidationError("rule set has no schema to decode rows with")
        bits = 0
        for r in range(x.rows):
            row = schema.decode_row(x.row_word(r))
            if self.covers(row):
                bits |= 1 << r
        return BitVector(x.rows, bits)


def simplify_rules(rules: Iterable[frozenset]) -> List[frozenset]:
    """Drop contradictions and apply absorption (supersets removed)."""
    consistent = []
    for rule in set(rules):
        attrs = [a for a, _ in rule]
        if len(attrs) == len(set(attrs)):
            consistent.append(rule)
    consistent.sort(key=len)
    kept: List[frozenset] = []
    for rule in consistent:
        if not any(k <= rule for k in kept):
            kept.append(rule)
    return kept


def extract_dnf(net: RuleNetwork, max_terms: int = 100_000) -> RuleSet:
    """Expand a conjunctive-first, disjunctive-last network into a rule set.

    Works layer by layer: first-layer nodes are single conjunctions of
    their selected literals, disjunctive nodes take the union of their
    sources' rule sets, conjunctive nodes distribute the product.  The
    running term count is bounded by ``max_terms``.
    """
    if net.output_negated:
        raise ValidationError("extraction requires a disjunctive output layer")

    schema = net.schema
    w0 = net.weights[0]
    node_rules: List[List[frozenset]] = []
    for k in range(w0.cols):
        lits = frozenset(
            (schema.col_attr[j], schema.col_value[j])
            for j in range(w0.rows) if w0.get(j, k)
        )
        node_rules.append(simplify_rules([lits]))

    for i in range(1, len(net.weights)):
        wt = net.weights[i].transpose()
        conjunctive = i % 2 == 0
        nxt: List[List[frozenset]] = []
        for k in range(wt.rows):
            sources = wt.row_word(k)
            selected = []
            while sources:
                low = sources & -sources
                selected.append(node_rules[low.bit_length() - 1])
                sources ^= low
            if conjunctive:
                acc: List[frozenset] = [frozenset()]
                for dnf in selected:
                    merged = []
                    for a in acc:
                        for b in dnf:
                            u = a | b
                            attrs = [x for x, _ in u]
                            if len(attrs) == len(set(attrs)):
                                merged.append(u)
                    acc = simplify_rules(merged)
                    if len(acc) > max_terms:
                        raise TermBudgetError(
                            f"expansion exceeded {max_terms} terms at layer {i}"
                        )
                nxt.append(acc)
            else:
                union: List[frozenset] = []
                for dnf in selected:
                    union.extend(dnf)
                acc = simplify_rules(union)
                if len(acc) > max_terms:
                    raise TermBudgetError(
                        f"expansion exceeded {max_terms} terms at layer {i}"
                    )
                nxt.append(acc)
        node_rules = nxt
        total = sum(len(r) for r in node_rules)
        if total > max_terms:
            raise TermBudgetError(f"expansion exceeded {max_terms} terms at layer {i}")

    return RuleSet(node_rules[0], schema)


def to_prolog(rs: RuleSet, head: str, schema: Schema | None = None) -> str:
    """Render a rule set one line per rule, Prolog style.

    Boolean attributes print bare or with a ``not`` prefix; other
    attributes print as name=value.  An empty rule set yields a single
    comment line, an empty conjunction a bare fact.
    """
    schema = schema or rs.schema
    if schema is None:
        raise ValidationError("rule set has no schema to name literals with")
    if not rs.rules:
        return f"% {head}: empty rule set.\n"
    lines = []
    for rule in rs.rules:
        if not rule:
            lines.append(f"{head}.")
            continue
        body = ", ".join(
            schema.literal_label(a, v) for a, v in sorted(rule)
        )
        lines.append(f"{head} :- {body}.")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# model document format

def save_network(net: RuleNetwork) -> str:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "hidden_sizes": list(net.hidden_sizes),
        "schema": [
            {"name": a.name, "values": list(a.values)} for a in net.schema.attributes
        ],
        "weights": [
            # one hex word per source row, low bit = target 0
            [format(w.row_word(j), "x") for j in range(w.rows)]
            for w in net.weights
        ],
    }
    return json.dumps(doc, indent=1)


def load_network(text: str) -> RuleNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc.msg}",
                         location=f"line {exc.lineno}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ParseError("not a rule-network document", location="format")
    if doc.get("version") != MODEL_VERSION:
        raise UnsupportedVersionError(
            f"version {doc.get('version')!r} not supported (expected {MODEL_VERSION})",
            location="version",
        )
    try:
        schema = Schema([
            Attribute(a["name"], tuple(a["values"])) for a in doc["schema"]
        ])
        hidden = [int(s) for s in doc["hidden_sizes"]]
        sizes = [schema.n_literals, *hidden, 1]
        raw = doc["weights"]
        if len(raw) != len(sizes) - 1:
            raise ParseError(
                f"{len(raw)} weight blocks for {len(sizes) - 1} layers",
                location="weights",
            )
        weights = []
        for i, block in enumerate(raw):
            if len(block) != sizes[i]:
                raise ParseError(
                    f"layer {i} has {len(block)} rows, expected {sizes[i]}",
                    location=f"weights[{i}]",
                )
            words = [int(h, 16) for h in block]
            if any(w >> sizes[i + 1] for w in words):
                raise ParseError(f"layer {i} row exceeds {sizes[i + 1]} columns",
                                 location=f"weights[{i}]")
            weights.append(BitMatrix(sizes[i], sizes[i + 1], words))
        return RuleNetwork(schema, hidden, weights)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed model document: {exc}") from exc


def save_network_file(net: RuleNetwork, path) -> None:
    with open(path, "w") as fh:
        fh.write(save_network(net))
        fh.write("\n")


def load_network_file(path) -> RuleNetwork:
    try:
        with open(path) as fh:
            return load_network(fh.read())
    except OSError as exc:
        raise ParseError(str(exc), location=str(path)) from exc
