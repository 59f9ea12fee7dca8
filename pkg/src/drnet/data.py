"""Nominal-attribute schemas and one-hot encoded datasets.

A Schema lists attributes with their ordered value sets.  Every attribute
occupies a contiguous run of literal columns, one per value.  Boolean
attributes use the value pair ("true", "false"): column 0 of the pair is
the positive literal, column 1 its negation, which is what the rule
printers rely on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .bitcore import BitMatrix, BitVector
from .errors import ParseError, ValidationError

BOOL_VALUES = ("true", "false")


@dataclass(frozen=True)
class Attribute:
    name: str
    values: Tuple[str, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValidationError(f"attribute {self.name!r} needs >= 2 values")
        if len(set(self.values)) != len(self.values):
            raise ValidationError(f"attribute {self.name!r} has duplicate values")

    @property
    def is_boolean(self) -> bool:
        return self.values == BOOL_VALUES


class Schema:
    def __init__(self, attributes: Sequence[Attribute]):
        if not attributes:
            raise ValidationError("schema needs at least one attribute")
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate attribute names")
        self.attributes: Tuple[Attribute, ...] = tuple(attributes)
        self.offsets: List[int] = []
        off = 0
        for a in self.attributes:
            self.offsets.append(off)
            off += len(a.values)
        self.n_literals = off
        # literal column -> (attribute index, value index)
        self.col_attr: List[int] = []
        self.col_value: List[int] = []
        for ai, a in enumerate(self.attributes):
            for vi in range(len(a.values)):
                self.col_attr.append(ai)
                self.col_value.append(vi)

    @classmethod
    def bool_vars(cls, names: Sequence[str]) -> "Schema":
        return cls([Attribute(n, BOOL_VALUES) for n in names])

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    def column(self, attr: int, value: int) -> int:
        return self.offsets[attr] + value

    def attr_columns(self, attr: int) -> range:
        off = self.offsets[attr]
        return range(off, off + len(self.attributes[attr].values))

    def literal_label(self, attr: int, value: int) -> str:
        a = self.attributes[attr]
        if a.is_boolean:
            return a.name if value == 0 else f"not {a.name}"
        return f"{a.name}={a.values[value]}"

    def encode_row(self, value_indices: Sequence[int]) -> int:
        """Pack one example (value index per attribute) into a row word."""
        if len(value_indices) != self.n_attributes:
            raise ValidationError(
                f"row has {len(value_indices)} values, schema has {self.n_attributes}"
            )
        word = 0
        for ai, vi in enumerate(value_indices):
            if not 0 <= vi < len(self.attributes[ai].values):
                raise ValidationError(
                    f"value index {vi} out of range for {self.attributes[ai].name}"
                )
            word |= 1 << (self.offsets[ai] + vi)
        return word

    def decode_row(self, word: int) -> List[int]:
        out = []
        for ai, a in enumerate(self.attributes):
            off = self.offsets[ai]
            chunk = (word >> off) & ((1 << len(a.values)) - 1)
            if chunk.bit_count() != 1:
                raise ValidationError(f"row not one-hot for attribute {a.name}")
            out.append(chunk.bit_length() - 1)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Schema) and self.attributes == other.attributes

    def __hash__(self):
        return hash(self.attributes)

    def __repr__(self) -> str:
        return f"Schema({[a.name for a in self.attributes]})"


class OneHotDataset:
    """Encoded rows plus labels.  ``y`` may be None for unlabeled rows."""

    def __init__(self, schema: Schema, x: BitMatrix, y: BitVector | None,
                 provenance: str = ""):
        if x.cols != schema.n_literals:
            raise ValidationError(
                f"matrix has {x.cols} columns, schema defines {schema.n_literals}"
            )
        if y is not None and len(y) != x.rows:
            raise ValidationError(f"{x.rows} rows but {len(y)} labels")
        self.schema = schema
        self.x = x
        self.y = y
        self.provenance = provenance

    @property
    def n_rows(self) -> int:
        return self.x.rows

    def pos_ratio(self) -> float:
        if self.y is None:
            raise ValidationError("dataset has no labels")
        return self.y.fraction()

    def check_one_hot(self) -> None:
        for r in range(self.x.rows):
            self.schema.decode_row(self.x.row_word(r))

    def subset(self, indices: Sequence[int]) -> "OneHotDataset":
        words = [self.x.row_word(i) for i in indices]
        x = BitMatrix(len(indices), self.x.cols, words)
        y = None
        if self.y is not None:
            y = BitVector.from_ints(self.y.get(i) for i in indices)
        return OneHotDataset(self.schema, x, y, self.provenance)

    def to_csv(self, path, class_tokens: Tuple[str, str] = ("negative", "positive")) -> None:
        """Write rows as nominal tokens; labels become a final class column."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = [a.name for a in self.schema.attributes]
            if self.y is not None:
                header.append("class")
            writer.writerow(header)
            for r in range(self.n_rows):
                vals = self.schema.decode_row(self.x.row_word(r))
                row = [self.schema.attributes[ai].values[vi] for ai, vi in enumerate(vals)]
                if self.y is not None:
                    row.append(class_tokens[self.y.get(r)])
                writer.writerow(row)


def _read_rows(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(str(exc), location=str(path)) from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise ParseError("file needs a header row and at least one data row",
                         location=str(path))
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"row {i} has {len(r)} fields, header has {width}",
                             location=str(path))
    return rows


def load_nominal_csv(path, *, class_column=-1, positive_class: str | None = None,
                     schema: Schema | None = None) -> OneHotDataset:
    """Load a nominal CSV with a header row into a one-hot dataset.

    Attribute values are collected from the data and ordered
    lexicographically, so the schema only depends on the file contents.
    Multi-class targets are binarized most-frequent-vs-rest and the more
    common binary class becomes the positive one, unless
    ``positive_class`` names the positive label explicitly.  Missing-value
    tokens such as "?" are kept as ordinary nominal values.  Passing a
    fixed ``schema`` re-applies it and rejects unseen values.
    """
    rows = _read_rows(path)
    header, data = rows[0], rows[1:]
    n_cols = len(header)
    cls_idx = class_column if class_column >= 0 else n_cols + class_column
    if not 0 <= cls_idx < n_cols:
        raise ValidationError(f"class column {class_column} out of range")
    attr_idx = [i for i in range(n_cols) if i != cls_idx]

    labels_raw = [r[cls_idx] for r in data]
    counts = {}
    for t in labels_raw:
        counts[t] = counts.get(t, 0) + 1
    if positive_class is not None:
        if positive_class not in counts:
            raise ValidationError(f"positive class {positive_class!r} absent from data")
        majority = positive_class
    else:
        # most frequent class; ties broken by token order for determinism
        majority = max(sorted(counts), key=lambda t: counts[t])
    y_bin = [1 if t == majority else 0 for t in labels_raw]
    if positive_class is None and len(counts) > 2:
        # most-frequent-vs-rest, then the more common side is positive
        if sum(y_bin) * 2 < len(y_bin):
            y_bin = [1 - v for v in y_bin]

    if schema is None:
        values = []
        for i in attr_idx:
            vals = sorted({r[i] for r in data})
            if len(vals) < 2:
                raise ValidationError(
                    f"attribute {header[i]!r} is constant; cannot one-hot encode"
                )
            if tuple(vals) == ("false", "true"):
                vals = list(BOOL_VALUES)  # keep boolean literal rendering
            values.append(vals)
        schema = Schema([Attribute(header[i], tuple(v))
                         for i, v in zip(attr_idx, values)])
    else:
        if [a.name for a in schema.attributes] != [header[i] for i in attr_idx]:
            raise ValidationError("fixed schema does not match file header")

    value_index = [
        {v: k for k, v in enumerate(a.values)} for a in schema.attributes
    ]
    words = []
    for rn, r in enumerate(data):
        word = 0
        for j, i in enumerate(attr_idx):
            try:
                vi = value_index[j][r[i]]
            except KeyError:
                raise ValidationError(
                    f"row {rn}: value {r[i]!r} not in schema for {header[i]!r}"
                ) from None
            word |= 1 << (schema.offsets[j] + vi)
        words.append(word)

    x = BitMatrix(len(words), schema.n_literals, words)
    y = BitVector.from_ints(y_bin)
    return OneHotDataset(schema, x, y, provenance=str(path))


def dataset_from_rows(schema: Schema, value_rows: Sequence[Sequence[int]],
                      labels: Sequence[int] | None, provenance: str = "") -> OneHotDataset:
    words = [schema.encode_row(r) for r in value_rows]
    x = BitMatrix(len(words), schema.n_literals, words)
    y = BitVector.from_ints(labels) if labels is not None else None
    return OneHotDataset(schema, x, y, provenance)
