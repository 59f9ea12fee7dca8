"""Experiment harness: cross-validation, grid search, rank statistics,
and report files.

All runs are deterministic for a fixed master seed: the 50/50 split of a
dataset depends only on (master seed, dataset id), training of a cell
only on (master seed, dataset id, model name, fold), so cells can be
computed in any order.  Reports are plain CSV with ``# key=value``
comment headers plus a human-readable summary; fold assignments are
published per dataset so external baselines can reuse identical splits.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .bitcore import BitVector
from .data import OneHotDataset
from .datagen import generate_concept, write_concept_files
from .errors import DegenerateModelError, ValidationError
from .network import NetworkConfig, RuleNetwork, initialize
from .seeding import derive_rng, derive_seed
from .training import TraceRecord, TrainParams, accuracy, fit

# ---------------------------------------------------------------------------
# model presets


@dataclass(frozen=True)
class ModelSpec:
    name: str
    config: NetworkConfig
    params: TrainParams = TrainParams()


def presets() -> Dict[str, ModelSpec]:
    """The three configurations used throughout the benchmark runs."""
    mk = lambda hidden, lbar, p: NetworkConfig(
        hidden_sizes=hidden, avg_rule_length=lbar, init_probability=p
    )
    return {
        "drnc5": ModelSpec("DRNC(5)", mk((32, 16, 8, 4, 2), 2.0, 0.05)),
        "drnc3": ModelSpec("DRNC(3)", mk((32, 8, 2), 3.0, 0.05)),
        "rnc": ModelSpec("RNC", mk((20,), 5.0, 0.05)),
    }


# ---------------------------------------------------------------------------
# cross-validation


def stratified_split(data: OneHotDataset, rng) -> Tuple[List[int], List[int]]:
    """One shuffled 50/50 split, stratified by class so neither half can
    end up single-class."""
    if data.y is None:
        raise ValidationError("dataset has no labels")
    pos = [i for i in range(data.n_rows) if data.y.get(i)]
    neg = [i for i in range(data.n_rows) if not data.y.get(i)]
    if not pos or not neg:
        raise ValidationError("dataset has a single class")
    rng.shuffle(pos)
    rng.shuffle(neg)
    a = sorted(pos[: len(pos) // 2] + neg[: len(neg) // 2])
    b = sorted(pos[len(pos) // 2:] + neg[len(neg) // 2:])
    return a, b


@dataclass
class FoldOutcome:
    accuracy: float
    retries: int
    trace: List[TraceRecord]


@dataclass
class CVResult:
    fold_accuracies: Tuple[float, float]
    mean_accuracy: float
    retries: int
    folds: Tuple[List[int], List[int]]
    traces: List[List[TraceRecord]]


def train_model(spec: ModelSpec, train: OneHotDataset, seed: int,
                trace: Optional[List[TraceRecord]] = None) -> RuleNetwork:
    config = spec.config.with_seed(seed)
    net = initialize(config, train.schema)
    params = replace(spec.params, seed=seed)
    return fit(net, train.x, train.y, params, trace=trace)


def is_degenerate(net: RuleNetwork, data: OneHotDataset) -> bool:
    pred = net.predict(data.x)
    return pred.popcount() in (0, data.n_rows)


def retry_on_degenerate(spec: ModelSpec, data: OneHotDataset, seed: int,
                        max_retries: int = 5,
                        trace: Optional[List[TraceRecord]] = None,
                        train_fn=train_model) -> Tuple[RuleNetwork, int]:
    """Train, re-initializing with the next seed while the result predicts
    a single class on its training data.  ``max_retries`` bounds the total
    number of attempts; exhaustion raises with the last network attached.
    """
    if max_retries < 1:
        raise ValidationError("max_retries must be >= 1")
    net = None
    for attempt in range(max_retries):
        attempt_trace: List[TraceRecord] = []
        net = train_fn(spec, data, seed + attempt, attempt_trace)
        if not is_degenerate(net, data):
            if trace is not None:
                trace.extend(attempt_trace)
            return net, attempt
    raise DegenerateModelError(
        f"{spec.name}: degenerate model after {max_retries} attempts",
        net=net, attempts=max_retries,
    )


def cross_validate(spec: ModelSpec, data: OneHotDataset, seed: int,
                   folds: Optional[Tuple[List[int], List[int]]] = None,
                   max_retries: int = 5) -> CVResult:
    """1x2-fold cross validation: train on each half, test on the other."""
    if folds is None:
        folds = stratified_split(data, derive_rng(seed, "split"))
    fold_a, fold_b = folds
    accs = []
    retries_total = 0
    traces: List[List[TraceRecord]] = []
    for f, (train_idx, test_idx) in enumerate([(fold_a, fold_b), (fold_b, fold_a)]):
        train = data.subset(train_idx)
        test = data.subset(test_idx)
        trace: List[TraceRecord] = []
        net, retries = retry_on_degenerate(
            spec, train, derive_seed(seed, "fold", f), max_retries, trace
        )
        retries_total += retries
        traces.append(trace)
        accs.append(accuracy(test.y, net.predict(test.x)))
    return CVResult((accs[0], accs[1]), sum(accs) / 2, retries_total,
                    (fold_a, fold_b), traces)


# ---------------------------------------------------------------------------
# rank statistics

# upper 95% chi-square quantiles for df = 1..9
_CHI2_CRIT_95 = [3.841, 5.991, 7.815, 9.488, 11.070, 12.592, 14.067, 15.507, 16.919]

# Nemenyi q values (infinite df) for k = 2..10
_NEMENYI_Q = {
    0.05: [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164],
    0.10: [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920],
}


class FriedmanResult(NamedTuple):
    statistic: float
    significant: bool


def rank_rows(table: Sequence[Sequence[float]]) -> List[List[float]]:
    """Per-dataset ranks, best (highest accuracy) first, ties averaged."""
    ranked = []
    for row in table:
        order = sorted(range(len(row)), key=lambda j: -row[j])
        ranks = [0.0] * len(row)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and row[order[j + 1]] == row[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for t in range(i, j + 1):
                ranks[order[t]] = avg
            i = j + 1
        ranked.append(ranks)
    return ranked


def average_ranks(table: Sequence[Sequence[float]]) -> List[float]:
    ranks = rank_rows(table)
    n = len(ranks)
    k = len(ranks[0])
    return [sum(r[j] for r in ranks) / n for j in range(k)]


def friedman_from_ranks(avg_ranks: Sequence[float], n: int) -> FriedmanResult:
    k = len(avg_ranks)
    if k < 3:
        raise ValidationError("need at least 3 models")
    if n < 2:
        raise ValidationError("need at least 2 datasets")
    if k - 1 > len(_CHI2_CRIT_95):
        raise ValidationError(f"no critical value tabulated for k={k}")
    stat = (12 * n) / (k * (k + 1)) * (
        sum(r * r for r in avg_ranks) - k * (k + 1) ** 2 / 4
    )
    return FriedmanResult(stat, stat > _CHI2_CRIT_95[k - 2])


def friedman_test(table: Sequence[Sequence[float]]) -> FriedmanResult:
    """Friedman chi-square over an accuracy table (datasets x models)."""
    if not table:
        raise ValidationError("empty accuracy table")
    k = len(table[0])
    if any(len(row) != k for row in table):
        raise ValidationError("ragged accuracy table")
    return friedman_from_ranks(average_ranks(table), len(table))


def nemenyi_cd(k: int, n: int, alpha: float = 0.05) -> float:
    """Critical distance between average ranks at the given level."""
    q_table = _NEMENYI_Q.get(alpha)
    if q_table is None:
        raise ValidationError(f"alpha {alpha} not tabulated (use 0.05 or 0.10)")
    if not 2 <= k <= 10:
        raise ValidationError(f"k={k} outside tabulated range 2..10")
    if n < 1:
        raise ValidationError("n must be >= 1")
    return q_table[k - 2] * math.sqrt(k * (k + 1) / (6 * n))


# ---------------------------------------------------------------------------
# experiment results and reports


@dataclass
class CellResult:
    dataset: str
    model: str
    cv: CVResult


@dataclass
class ExperimentResult:
    suite: str
    protocol: str
    datasets: List[str]
    pos_ratios: Dict[str, float]
    models: List[str]
    cells: Dict[Tuple[str, str], CellResult] = field(default_factory=dict)

    def accuracy_table(self) -> List[List[float]]:
        return [
            [self.cells[(d, m)].cv.mean_accuracy for m in self.models]
            for d in self.datasets
        ]

    def avg_accuracies(self) -> List[float]:
        table = self.accuracy_table()
        return [sum(row[j] for row in table) / len(table)
                for j in range(len(self.models))]

    def avg_ranks(self) -> List[float]:
        return average_ranks(self.accuracy_table())

    def curve(self, model: str) -> List[float]:
        """Mean full-training accuracy per mini-batch position, averaged
        over datasets and folds (positions shared by every trace)."""
        traces = []
        for d in self.datasets:
            for t in self.cells[(d, model)].cv.traces:
                traces.append([rec.accuracy for rec in t])
        length = min(len(t) for t in traces)
        return [sum(t[i] for t in traces) / len(traces) for i in range(length)]

    # -- files --

    def write_report(self, out_dir) -> str:
        reports = os.path.join(out_dir, "reports")
        os.makedirs(reports, exist_ok=True)
        path = os.path.join(reports, f"{self.suite}_report.csv")
        with open(path, "w", newline="") as fh:
            fh.write(f"# suite={self.suite}\n")
            fh.write(f"# protocol={self.protocol}\n")
            writer = csv.writer(fh)
            writer.writerow(["dataset", "pos_ratio", *self.models])
            for d in self.datasets:
                row = [d, f"{self.pos_ratios[d]:.4f}"]
                row += [f"{self.cells[(d, m)].cv.mean_accuracy:.4f}"
                        for m in self.models]
                writer.writerow(row)
        self._write_summary(reports)
        self._write_details(reports)
        self._write_curves(reports)
        return path

    def _write_summary(self, reports) -> None:
        table = self.accuracy_table()
        avg_acc = self.avg_accuracies()
        ranks = self.avg_ranks()
        lines = [f"suite: {self.suite}", f"protocol: {self.protocol}", ""]
        header = ["dataset", "%(+)"] + self.models
        widths = [max(12, len(h) + 2) for h in header]
        lines.append("".join(h.ljust(w) for h, w in zip(header, widths)))
        for i, d in enumerate(self.datasets):
            row = table[i]
            best = max(row)
            cells = [d, f"{self.pos_ratios[d]:.4f}"]
            cells += [f"{v:.4f}" + ("*" if v == best else "") for v in row]
            lines.append("".join(c.ljust(w) for c, w in zip(cells, widths)))
        lines.append("")
        lines.append("".join(c.ljust(w) for c, w in zip(
            ["avg accuracy", ""] + [f"{a:.4f}" for a in avg_acc], widths)))
        lines.append("".join(c.ljust(w) for c, w in zip(
            ["avg rank", ""] + [f"{r:.4f}" for r in ranks], widths)))
        retr = ["retries", ""] + [
            str(sum(self.cells[(d, m)].cv.retries for d in self.datasets))
            for m in self.models
        ]
        lines.append("".join(c.ljust(w) for c, w in zip(retr, widths)))
        if len(self.models) >= 3 and len(self.datasets) >= 2:
            stat, sig = friedman_from_ranks(ranks, len(self.datasets))
            cd = nemenyi_cd(len(self.models), len(self.datasets), 0.05)
            lines.append("")
            lines.append(f"friedman chi2 = {stat:.4f} "
                         f"({'significant' if sig else 'not significant'} at 95%)")
            lines.append(f"nemenyi CD (95%) = {cd:.4f}")
        with open(os.path.join(reports, f"{self.suite}_summary.txt"), "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def _write_details(self, reports) -> None:
        doc = {
            "suite": self.suite,
            "protocol": self.protocol,
            "models": self.models,
            "datasets": [
                {
                    "id": d,
                    "pos_ratio": self.pos_ratios[d],
                    "cells": {
                        m: {
                            "folds": list(self.cells[(d, m)].cv.fold_accuracies),
                            "mean": self.cells[(d, m)].cv.mean_accuracy,
                            "retries": self.cells[(d, m)].cv.retries,
                        }
                        for m in self.models
                    },
                }
                for d in self.datasets
            ],
        }
        with open(os.path.join(reports, f"{self.suite}_details.json"), "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")

    def _write_curves(self, reports) -> None:
        path = os.path.join(reports, f"{self.suite}_curves.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "position", "mean_accuracy"])
            for m in self.models:
                for i, v in enumerate(self.curve(m)):
                    writer.writerow([m, i, f"{v:.6f}"])


def write_folds(dataset_id: str, folds: Tuple[List[int], List[int]],
                protocol: str, out_dir) -> str:
    folds_dir = os.path.join(out_dir, "folds")
    os.makedirs(folds_dir, exist_ok=True)
    path = os.path.join(folds_dir, f"{dataset_id}.folds.csv")
    assignment = {}
    for f, idxs in enumerate(folds):
        for i in idxs:
            assignment[i] = f
    with open(path, "w", newline="") as fh:
        fh.write(f"# protocol={protocol}\n")
        writer = csv.writer(fh)
        writer.writerow(["row", "fold"])
        for i in sorted(assignment):
            writer.writerow([i, assignment[i]])
    return path


def write_trace_files(result: ExperimentResult, out_dir) -> None:
    traces_dir = os.path.join(out_dir, "traces")
    os.makedirs(traces_dir, exist_ok=True)
    for (d, m), cell in sorted(result.cells.items()):
        for f, trace in enumerate(cell.cv.traces):
            path = os.path.join(traces_dir, f"{d}__{m}__fold{f}.csv")
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["epoch", "batch", "accuracy"])
                for rec in trace:
                    writer.writerow([rec.epoch, rec.batch, f"{rec.accuracy:.6f}"])


# ---------------------------------------------------------------------------
# suites


def _protocol(master_seed: int) -> str:
    return f"cv-1x2-stratified-seed{master_seed}"


def _run_suite(suite: str, datasets: List[Tuple[str, OneHotDataset]],
               specs: Sequence[ModelSpec], master_seed: int,
               out_dir: Optional[str]) -> ExperimentResult:
    protocol = _protocol(master_seed)
    result = ExperimentResult(
        suite=suite,
        protocol=protocol,
        datasets=[d for d, _ in datasets],
        pos_ratios={d: ds.pos_ratio() for d, ds in datasets},
        models=[s.name for s in specs],
    )
    for dataset_id, ds in datasets:
        folds = stratified_split(ds, derive_rng(master_seed, "split", dataset_id))
        if out_dir:
            write_folds(dataset_id, folds, protocol, out_dir)
        for spec in specs:
            cv = cross_validate(
                spec, ds, derive_seed(master_seed, dataset_id, spec.name),
                folds=folds,
            )
            result.cells[(dataset_id, spec.name)] = CellResult(dataset_id, spec.name, cv)
    if out_dir and specs:
        result.write_report(out_dir)
        write_trace_files(result, out_dir)
    return result


def run_artificial_suite(seeds: Sequence[int], specs: Sequence[ModelSpec],
                         out_dir: Optional[str] = None,
                         master_seed: int = 0) -> ExperimentResult:
    """Generate one concept per seed, export data files, and evaluate all
    specs with 1x2-fold cross validation."""
    datasets = []
    for seed in seeds:
        res = generate_concept(seed)
        if out_dir:
            write_concept_files(res, os.path.join(out_dir, "data"))
        datasets.append((f"gen_{seed:04d}", res.dataset))
    return _run_suite("artificial", datasets, specs, master_seed, out_dir)


def run_uci_suite(named_paths: Sequence[Tuple[str, str]],
                  specs: Sequence[ModelSpec],
                  out_dir: Optional[str] = None,
                  master_seed: int = 0) -> ExperimentResult:
    """Evaluate specs on stored benchmark CSV files."""
    from .datagen import load_uci

    datasets = []
    for name, path in named_paths:
        if not os.path.exists(path):
            raise ValidationError(f"dataset file missing: {path}")
        datasets.append((name, load_uci(name, path)))
    return _run_suite("uci", datasets, specs, master_seed, out_dir)


# ---------------------------------------------------------------------------
# hyperparameter grid


DEEP_STRUCTURES = [
    (72, 36, 12, 6, 2), (32, 16, 8, 4, 2),
    (36, 12, 6, 2), (16, 8, 4, 2),
    (12, 6, 2), (8, 4, 2),
]
DEEP_RULE_LENGTHS = [1.0, 2.0, 3.0]
DEEP_PROBABILITIES = [0.025, 0.075, 0.125]
SHALLOW_SIZES = [10, 20, 50, 100, 200, 500]
SHALLOW_RULE_LENGTHS = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]


def grid_combinations() -> List[ModelSpec]:
    """Every deep and shallow combination of the tuning grid, trained for
    a single epoch."""
    params = TrainParams(n_epochs=1)
    specs = []
    for hidden in DEEP_STRUCTURES:
        for lbar in DEEP_RULE_LENGTHS:
            for p in DEEP_PROBABILITIES:
                name = f"deep{len(hidden)}-{'x'.join(map(str, hidden))}-l{lbar:g}-p{p:g}"
                specs.append(ModelSpec(
                    name, NetworkConfig(hidden, lbar, p), params))
    for s1 in SHALLOW_SIZES:
        for lbar in SHALLOW_RULE_LENGTHS:
            specs.append(ModelSpec(
                f"shallow-{s1}-l{lbar:g}",
                NetworkConfig((s1,), lbar, 0.05), params))
    return specs


def grid_search(datasets: Sequence[Tuple[str, OneHotDataset]],
                master_seed: int = 0,
                specs: Optional[Sequence[ModelSpec]] = None) -> List[Tuple[str, float]]:
    """Mean CV accuracy over the dataset collection for every grid entry."""
    specs = list(specs) if specs is not None else grid_combinations()
    rows = []
    for spec in specs:
        accs = []
        for dataset_id, ds in datasets:
            folds = stratified_split(ds, derive_rng(master_seed, "split", dataset_id))
            cv = cross_validate(
                spec, ds, derive_seed(master_seed, dataset_id, spec.name),
                folds=folds,
            )
            accs.append(cv.mean_accuracy)
        rows.append((spec.name, sum(accs) / len(accs)))
    return rows


def write_grid_report(rows: Sequence[Tuple[str, float]], out_dir) -> str:
    reports = os.path.join(out_dir, "reports")
    os.makedirs(reports, exist_ok=True)
    path = os.path.join(reports, "grid_report.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["combination", "mean_accuracy"])
        for name, acc in rows:
            writer.writerow([name, f"{acc:.4f}"])
    return path
