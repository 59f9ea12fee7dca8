"""Run baseline learners on drnet-emitted CSV datasets with the published
fold assignments."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .report_io import ReportError, read_folds, write_report


@dataclass
class BaselineRow:
    dataset: str
    baseline: str
    fold_accuracies: Tuple[float, float]

    @property
    def mean_accuracy(self) -> float:
        return sum(self.fold_accuracies) / len(self.fold_accuracies)


def _load_csv(path: str) -> Tuple[np.ndarray, np.ndarray, float]:
    """One-hot feature matrix, binary labels, and the positive ratio.

    The class column is the last one; a ``positive`` token marks the
    positive class when present, otherwise the more frequent token wins
    (multi-class targets become most-frequent-vs-rest).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise ReportError(f"empty dataset: {path}")
    data = rows[1:]
    labels = [r[-1] for r in data]
    tokens = sorted(set(labels))
    if "positive" in tokens:
        positive = "positive"
    else:
        counts = {t: labels.count(t) for t in tokens}
        positive = max(tokens, key=lambda t: counts[t])
        if len(tokens) > 2 and labels.count(positive) * 2 < len(labels):
            # most-frequent-vs-rest, the more common side is positive
            y = np.array([0 if t == positive else 1 for t in labels])
            x = _one_hot([r[:-1] for r in data])
            return x, y, float(y.mean())
    y = np.array([1 if t == positive else 0 for t in labels])
    x = _one_hot([r[:-1] for r in data])
    return x, y, float(y.mean())


def _one_hot(rows: List[List[str]]) -> np.ndarray:
    n_attrs = len(rows[0])
    columns = []
    for j in range(n_attrs):
        values = sorted({r[j] for r in rows})
        index = {v: i for i, v in enumerate(values)}
        block = np.zeros((len(rows), len(values)), dtype=np.int8)
        for i, r in enumerate(rows):
            block[i, index[r[j]]] = 1
        columns.append(block)
    return np.hstack(columns)


def _cart_factory():
    from sklearn.tree import DecisionTreeClassifier

    return lambda: DecisionTreeClassifier()


def _ripper_factory():
    import wittgenstein

    return lambda: wittgenstein.RIPPER()


def available_baselines() -> Dict[str, object]:
    """Baselines runnable in this environment, in report column order.

    RIPPER is optional; without the wittgenstein package the report simply
    has no Ripper column.
    """
    table: Dict[str, object] = {}
    try:
        table["Ripper"] = _ripper_factory()
    except ImportError:
        pass
    table["CART"] = _cart_factory()
    return table


def _evaluate(make_model, x: np.ndarray, y: np.ndarray,
              assignment: Dict[int, int]) -> Tuple[float, float]:
    if len(assignment) != len(y):
        raise ReportError(
            f"fold file covers {len(assignment)} rows, dataset has {len(y)}"
        )
    fold = np.array([assignment[i] for i in range(len(y))])
    accs = []
    for test_fold in (1, 0):
        train = fold != test_fold
        test = ~train
        model = make_model()
        model.fit(x[train], y[train])
        pred = np.asarray(model.predict(x[test])).astype(int)
        accs.append(float((pred == y[test]).mean()))
    # fold 0 trains first (tested on fold 1), matching the primary order
    return accs[0], accs[1]


def run_baselines(data_dir: str, folds_dir: str, out_path: str,
                  baselines: Optional[Sequence[str]] = None,
                  suite: str = "artificial") -> List[BaselineRow]:
    """Evaluate every dataset in ``data_dir`` with the published folds and
    write a report mergeable with the primary one."""
    available = available_baselines()
    if baselines is not None:
        missing = [b for b in baselines if b not in available]
        if missing:
            raise ReportError(
                f"baselines not available here: {missing} "
                f"(installed: {sorted(available)})"
            )
        available = {b: available[b] for b in baselines}

    names = sorted(f for f in os.listdir(data_dir)
                   if f.endswith(".csv") and not f.endswith(".meta.csv"))
    if not names:
        raise ReportError(f"no datasets found in {data_dir}")

    rows_out: List[BaselineRow] = []
    protocols = set()
    table_rows = []
    for name in names:
        dataset_id = name[:-4]
        x, y, _ = _load_csv(os.path.join(data_dir, name))
        protocol, assignment = read_folds(
            os.path.join(folds_dir, f"{dataset_id}.folds.csv"))
        protocols.add(protocol)
        cells = []
        for baseline, factory in available.items():
            fold_accs = _evaluate(factory, x, y, assignment)
            rows_out.append(BaselineRow(dataset_id, baseline, fold_accs))
            cells.append(f"{sum(fold_accs) / 2:.4f}")
        table_rows.append([dataset_id, *cells])

    if len(protocols) != 1:
        raise ReportError(f"mixed fold protocols: {sorted(protocols)}")
    meta = {"suite": suite, "protocol": protocols.pop()}
    write_report(out_path, meta, ["dataset", *available.keys()], table_rows)
    return rows_out
