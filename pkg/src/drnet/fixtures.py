"""Hand-built reference networks and rule sets.

Two concepts ship as fixtures:

* five-variable parity (true when an even number of x1..x5 are set),
  both as the flat 16-rule set and as a deep network that threads the
  running parity of a growing suffix through its layers;
* a ten-variable nested concept available as an equivalent pair of a
  flat nine-rule DNF and a three-hidden-layer network.

The deep parity network routes raw variables forward through
pass-through nodes because every layer only sees its predecessor.
"""

from __future__ import annotations

from itertools import combinations
from typing import List, Tuple

from .bitcore import BitMatrix
from .data import Schema
from .network import RuleNetwork, RuleSet, to_prolog

PARITY_VARS = ["x1", "x2", "x3", "x4", "x5"]
NESTED_VARS = list("abcdefghij")


def parity_schema() -> Schema:
    return Schema.bool_vars(PARITY_VARS)


def parity_oracle(assignment: int, n_vars: int = 5) -> int:
    """1 when an even number of variables is true (the fixture's target)."""
    return 1 - (assignment.bit_count() & 1) if n_vars else 1


def parity_flat_rules() -> RuleSet:
    """All 16 five-literal conjunctions selecting even-weight assignments."""
    rules = []
    n = len(PARITY_VARS)
    for k in range(0, n + 1, 2):
        for true_set in combinations(range(n), k):
            rules.append(frozenset(
                (i, 0 if i in true_set else 1) for i in range(n)
            ))
    return RuleSet(rules, parity_schema())


def _matrix(rows: int, cols: int, edges: List[Tuple[int, int]]) -> BitMatrix:
    m = BitMatrix.zeros(rows, cols)
    for j, k in edges:
        m.set(j, k, 1)
    return m


def parity_deep_network() -> RuleNetwork:
    """Deep parity network with hidden sizes [10, 8, 8, 6, 6, 4, 2].

    Conjunctive layers pair each remaining variable with the parity (or
    its complement) of the variables after it; disjunctive layers merge
    the two matching conjunctions and forward untouched variables.
    """
    schema = parity_schema()
    lit = {}
    for i, name in enumerate(PARITY_VARS):
        lit[name] = schema.column(i, 0)
        lit["not " + name] = schema.column(i, 1)

    # layer 1 (AND): x4/x5 combinations plus pass-throughs for x1..x3
    w0 = _matrix(10, 10, [
        (lit["x4"], 0), (lit["x5"], 0),              # x4 & x5
        (lit["not x4"], 1), (lit["not x5"], 1),      # !x4 & !x5
        (lit["x4"], 2), (lit["not x5"], 2),          # x4 & !x5
        (lit["not x4"], 3), (lit["x5"], 3),          # !x4 & x5
        (lit["x3"], 4), (lit["not x3"], 5),
        (lit["x2"], 6), (lit["not x2"], 7),
        (lit["x1"], 8), (lit["not x1"], 9),
    ])
    # layer 2 (OR): p45, !p45, forwarded x3/x2/x1 literals
    w1 = _matrix(10, 8, [
        (0, 0), (1, 0),      # p45
        (2, 1), (3, 1),      # !p45
        (4, 2), (5, 3),      # x3, !x3
        (6, 4), (7, 5),      # x2, !x2
        (8, 6), (9, 7),      # x1, !x1
    ])
    # layer 3 (AND): the four x3/p45 combinations plus pass-throughs
    w2 = _matrix(8, 8, [
        (2, 0), (1, 0),      # x3 & !p45
        (3, 1), (0, 1),      # !x3 & p45
        (2, 2), (0, 2),      # x3 & p45
        (3, 3), (1, 3),      # !x3 & !p45
        (4, 4), (5, 5),      # x2, !x2
        (6, 6), (7, 7),      # x1, !x1
    ])
    # layer 4 (OR): p345, !p345, forwarded x2/x1
    w3 = _matrix(8, 6, [
        (0, 0), (1, 0),
        (2, 1), (3, 1),
        (4, 2), (5, 3),
        (6, 4), (7, 5),
    ])
    # layer 5 (AND): x2/p345 combinations plus x1 pass-throughs
    w4 = _matrix(6, 6, [
        (2, 0), (1, 0),      # x2 & !p345
        (3, 1), (0, 1),      # !x2 & p345
        (2, 2), (0, 2),      # x2 & p345
        (3, 3), (1, 3),      # !x2 & !p345
        (4, 4), (5, 5),      # x1, !x1
    ])
    # layer 6 (OR): p2345, !p2345, forwarded x1
    w5 = _matrix(6, 4, [
        (0, 0), (1, 0),
        (2, 1), (3, 1),
        (4, 2), (5, 3),
    ])
    # layer 7 (AND): x1 & !p2345, !x1 & p2345
    w6 = _matrix(4, 2, [
        (2, 0), (1, 0),
        (3, 1), (0, 1),
    ])
    # output (OR)
    w7 = _matrix(2, 1, [(0, 0), (1, 0)])

    return RuleNetwork(schema, (10, 8, 8, 6, 6, 4, 2),
                       [w0, w1, w2, w3, w4, w5, w6, w7])


def parity_structured_prolog() -> str:
    """The eight-rule layered formulation with auxiliary predicates."""
    aux = Schema.bool_vars(PARITY_VARS + ["parity45", "parity345", "parity2345"])
    idx = {a.name: i for i, a in enumerate(aux.attributes)}

    def pair(head: str, var: str, sub: str | None) -> str:
        if sub is None:
            rules = RuleSet([
                frozenset([(idx["x4"], 0), (idx["x5"], 0)]),
                frozenset([(idx["x4"], 1), (idx["x5"], 1)]),
            ], aux)
        else:
            rules = RuleSet([
                frozenset([(idx[var], 0), (idx[sub], 1)]),
                frozenset([(idx[var], 1), (idx[sub], 0)]),
            ], aux)
        return to_prolog(rules, head)

    return "".join([
        pair("parity45", "x4", None),
        pair("parity345", "x3", "parity45"),
        pair("parity2345", "x2", "parity345"),
        pair("parity", "x1", "parity2345"),
    ])


def nested_schema() -> Schema:
    return Schema.bool_vars(NESTED_VARS)


def nested_flat_rules() -> RuleSet:
    """The nine-rule flat form of the nested fixture concept."""
    schema = nested_schema()
    v = {name: i for i, name in enumerate(NESTED_VARS)}
    T, F = 0, 1

    def rule(*lits):
        return frozenset((v[name], pol) for name, pol in lits)

    rules = [
        rule(("b", T), ("d", F), ("i", T)),
        rule(("b", T), ("h", T), ("i", T)),
        rule(("b", T), ("d", T), ("f", T), ("h", T)),
        rule(("b", F), ("c", T), ("i", T)),
        rule(("b", F), ("i", T), ("j", T)),
        rule(("c", T), ("h", T)),
        rule(("c", T), ("d", F)),
        rule(("d", F), ("j", T)),
        rule(("h", T), ("j", T)),
    ]
    return RuleSet(rules, schema)


def nested_deep_network() -> RuleNetwork:
    """Three-hidden-layer network computing the same nested concept:
    (((b&i) | c | j) & ((!b&i) | !d | h)) | (b&d&f&h)."""
    schema = nested_schema()
    v = {name: i for i, name in enumerate(NESTED_VARS)}

    def col(name: str, positive: bool = True) -> int:
        return schema.column(v[name], 0 if positive else 1)

    # layer 1 (AND), 7 nodes
    w0 = _matrix(20, 7, [
        (col("b"), 0), (col("i"), 0),                      # b & i
        (col("b", False), 1), (col("i"), 1),               # !b & i
        (col("b"), 2), (col("d"), 2), (col("f"), 2), (col("h"), 2),
        (col("c"), 3),
        (col("j"), 4),
        (col("d", False), 5),
        (col("h"), 6),
    ])
    # layer 2 (OR), 3 nodes
    w1 = _matrix(7, 3, [
        (0, 0), (3, 0), (4, 0),    # (b&i) | c | j
        (1, 1), (5, 1), (6, 1),    # (!b&i) | !d | h
        (2, 2),                    # b&d&f&h forwarded
    ])
    # layer 3 (AND), 2 nodes
    w2 = _matrix(3, 2, [
        (0, 0), (1, 0),
        (2, 1),
    ])
    # output (OR)
    w3 = _matrix(2, 1, [(0, 0), (1, 0)])
    return RuleNetwork(schema, (7, 3, 2), [w0, w1, w2, w3])
