"""Command-line front door.

Exit codes: 0 success, 1 usage error, 2 data error (bad or missing
inputs), 3 internal error.  A master seed threads into every stochastic
component through derived sub-seeds, so runs with the same arguments
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from typing import List, Optional

from . import datagen, experiments, fixtures
from .data import load_nominal_csv
from .errors import DataError, DrnetError
from .network import (
    NetworkConfig,
    extract_dnf,
    load_network_file,
    save_network_file,
    to_prolog,
)
from .seeding import derive_seed
from .training import TrainParams, accuracy, fit

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    pass


def _require_file(path: str) -> str:
    if not os.path.exists(path):
        raise DataError(f"file not found: {path}")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drnet", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed for all stochastic steps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate artificial concept datasets")
    p.add_argument("--seeds", required=True,
                   help="comma-separated generator seeds, e.g. 5,16,19")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-vars", type=int, default=10)

    p = sub.add_parser("train", help="train one network on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--preset", choices=sorted(experiments.presets()))
    p.add_argument("--hidden", help="comma-separated hidden sizes, e.g. 32,8,2")
    p.add_argument("--rule-length", type=float, help="average initial rule length")
    p.add_argument("--p", type=float, help="hidden-layer init probability")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--max-flips", type=int)
    p.add_argument("--positive-class", help="explicit positive class token")
    p.add_argument("--class-column", type=int, default=-1)
    p.add_argument("--out-model", help="model file to write")
    p.add_argument("--out-trace", help="trace CSV to write")

    p = sub.add_parser("predict", help="apply a stored model to a CSV dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--positive-class")
    p.add_argument("--class-column", type=int, default=-1)
    p.add_argument("--out", help="write predictions CSV here")

    p = sub.add_parser("export-rules", help="print a model as Prolog-style rules")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model")
    group.add_argument("--fixture", choices=["parity-deep", "parity-flat", "nested"])
    p.add_argument("--head", default="concept", help="predicate name for rule heads")

    p = sub.add_parser("grid-search", help="run the hyperparameter grid")
    p.add_argument("--data-dir", required=True,
                   help="directory of generated concept CSVs")
    p.add_argument("--out", required=True)

    p = sub.add_parser("experiment", help="run a benchmark suite")
    p.add_argument("--suite", choices=["artificial", "uci"], required=True)
    p.add_argument("--seeds-file", help="file with one generator seed per line")
    p.add_argument("--seeds", help="comma-separated generator seeds")
    p.add_argument("--data-dir", help="directory with stored benchmark CSVs")
    p.add_argument("--datasets", help="comma-separated benchmark names")
    p.add_argument("--models", default="drnc5,drnc3,rnc",
                   help="comma-separated preset ids, or 'none' for data/folds only")
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="Friedman/Nemenyi summary of a report")
    p.add_argument("report")
    p.add_argument("--alpha", type=float, default=0.05)

    return parser


def _parse_seeds(arg: str) -> List[int]:
    try:
        return [int(s) for s in arg.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise DataError(f"bad seed list {arg!r}: {exc}") from None


def _model_specs(arg: str) -> List[experiments.ModelSpec]:
    if arg.strip().lower() in ("none", ""):
        return []
    table = experiments.presets()
    specs = []
    for token in arg.split(","):
        token = token.strip().lower()
        if token not in table:
            raise DataError(f"unknown preset {token!r}; choices: {sorted(table)}")
        specs.append(table[token])
    return specs


def cmd_gen_data(args) -> int:
    for seed in _parse_seeds(args.seeds):
        result = datagen.generate_concept(seed, n_vars=args.n_vars)
        csv_path, meta_path = datagen.write_concept_files(
            result, os.path.join(args.out, "data"))
        print(f"seed {seed}: {csv_path} (+{os.path.basename(meta_path)}) "
              f"pos_ratio={result.pos_ratio:.4f} rules={result.rule_count}")
    return EXIT_OK


def _load_csv(args):
    return load_nominal_csv(
        _require_file(args.data),
        class_column=args.class_column,
        positive_class=args.positive_class,
    )


def cmd_train(args) -> int:
    data = _load_csv(args)
    if args.preset:
        spec = experiments.presets()[args.preset]
        config, params = spec.config, spec.params
    else:
        if not args.hidden:
            raise DataError("either --preset or --hidden is required")
        config = NetworkConfig(
            hidden_sizes=tuple(int(s) for s in args.hidden.split(",")),
            avg_rule_length=args.rule_length if args.rule_length is not None else 2.0,
            init_probability=args.p if args.p is not None else 0.05,
        )
        params = TrainParams()
    if args.rule_length is not None and args.preset:
        config = replace(config, avg_rule_length=args.rule_length)
    if args.p is not None and args.preset:
        config = replace(config, init_probability=args.p)
    if args.epochs is not None:
        params = replace(params, n_epochs=args.epochs)
    if args.batch_size is not None:
        params = replace(params, batch_size=args.batch_size)
    if args.max_flips is not None:
        params = replace(params, max_flips=args.max_flips)

    seed = derive_seed(args.seed, "train", os.path.basename(args.data))
    net = experiments.train_model(
        experiments.ModelSpec("cli", config.with_seed(seed), params),
        data, seed, trace := [])
    final = accuracy(data.y, net.predict(data.x))
    print(f"training accuracy: {final:.4f}")
    if args.out_model:
        os.makedirs(os.path.dirname(args.out_model) or ".", exist_ok=True)
        save_network_file(net, args.out_model)
        print(f"model written to {args.out_model}")
    if args.out_trace:
        os.makedirs(os.path.dirname(args.out_trace) or ".", exist_ok=True)
        with open(args.out_trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "batch", "accuracy"])
            for rec in trace:
                writer.writerow([rec.epoch, rec.batch, f"{rec.accuracy:.6f}"])
        print(f"trace written to {args.out_trace}")
    return EXIT_OK


def cmd_predict(args) -> int:
    net = load_network_file(_require_file(args.model))
    data = _load_csv(args)
    if data.schema != net.schema:
        raise DataError("dataset schema does not match the model's schema")
    pred = net.predict(data.x)
    if data.y is not None:
        print(f"accuracy: {accuracy(data.y, pred):.4f}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "prediction"])
            for i in range(len(pred)):
                writer.writerow([i, pred.get(i)])
        print(f"predictions written to {args.out}")
    else:
        print("predictions:", "".join(str(pred.get(i)) for i in range(len(pred))))
    return EXIT_OK


def cmd_export_rules(args) -> int:
    if args.fixture == "parity-deep":
        sys.stdout.write(fixtures.parity_structured_prolog())
        return EXIT_OK
    if args.fixture == "parity-flat":
        sys.stdout.write(to_prolog(fixtures.parity_flat_rules(), "parity"))
        return EXIT_OK
    if args.fixture == "nested":
        sys.stdout.write(to_prolog(fixtures.nested_flat_rules(), args.head))
        return EXIT_OK
    net = load_network_file(_require_file(args.model))
    rules = extract_dnf(net)
    sys.stdout.write(to_prolog(rules, args.head))
    return EXIT_OK


def _gen_datasets_from_dir(data_dir):
    names = sorted(f for f in os.listdir(data_dir) if f.endswith(".csv"))
    if not names:
        raise DataError(f"no CSV files in {data_dir}")
    out = []
    for name in names:
        ds = load_nominal_csv(os.path.join(data_dir, name),
                              positive_class="positive")
        out.append((name[:-4], ds))
    return out


def cmd_grid_search(args) -> int:
    datasets = _gen_datasets_from_dir(_require_file(args.data_dir))
    rows = experiments.grid_search(datasets, master_seed=args.seed)
    path = experiments.write_grid_report(rows, args.out)
    best = max(rows, key=lambda r: r[1])
    print(f"{len(rows)} combinations evaluated; best {best[0]} ({best[1]:.4f})")
    print(f"report written to {path}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    specs = _model_specs(args.models)
    if args.suite == "artificial":
        if args.seeds_file:
            with open(_require_file(args.seeds_file)) as fh:
                seeds = [int(line.strip()) for line in fh if line.strip()]
        elif args.seeds:
            seeds = _parse_seeds(args.seeds)
        else:
            raise DataError("--seeds-file or --seeds is required for artificial")
        result = experiments.run_artificial_suite(
            seeds, specs, out_dir=args.out, master_seed=args.seed)
    else:
        if not args.data_dir:
            raise DataError("--data-dir is required for the uci suite")
        names = (args.datasets.split(",") if args.datasets
                 else sorted(datagen.UCI_COLUMNS))
        paths = []
        for name in names:
            path = os.path.join(args.data_dir, f"{name}.csv")
            if not os.path.exists(path):
                raise DataError(f"dataset file missing: {path}")
            paths.append((name, path))
        result = experiments.run_uci_suite(
            paths, specs, out_dir=args.out, master_seed=args.seed)
    if specs:
        for name, acc in zip(result.models, result.avg_accuracies()):
            print(f"{name}: mean accuracy {acc:.4f}")
        print(f"reports under {os.path.join(args.out, 'reports')}")
    else:
        print(f"datasets and folds written under {args.out}")
    return EXIT_OK


def read_report(path: str):
    """Parse a report CSV (ignoring # comment headers) into
    (meta, dataset ids, model names, accuracy table)."""
    meta = {}
    with open(_require_file(path)) as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].strip().split("=", 1)
                    meta[k.strip()] = v.strip()
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    if not rows:
        raise DataError(f"empty report: {path}")
    header = rows[0]
    models = [h for h in header[1:] if h != "pos_ratio"]
    datasets, table = [], []
    for row in rows[1:]:
        if not row:
            continue
        datasets.append(row[0])
        offset = 2 if "pos_ratio" in header else 1
        try:
            table.append([float(v) for v in row[offset:]])
        except ValueError as exc:
            raise DataError(f"non-numeric accuracy in {path}: {exc}") from None
    return meta, datasets, models, table


def cmd_stats(args) -> int:
    _, datasets, models, table = read_report(args.report)
    if len(models) < 3:
        raise DataError("need at least 3 model columns for rank statistics")
    ranks = experiments.average_ranks(table)
    stat, significant = experiments.friedman_from_ranks(ranks, len(table))
    cd = experiments.nemenyi_cd(len(models), len(table), args.alpha)
    print(f"datasets: {len(datasets)}  models: {len(models)}")
    for name, rank in zip(models, ranks):
        print(f"  {name}: average rank {rank:.4f}")
    print(f"friedman chi2 = {stat:.4f} -> "
          f"{'significant' if significant else 'not significant'} at 95%")
    print(f"nemenyi CD = {cd:.3f} (k={len(models)}, N={len(table)}, "
          f"alpha={args.alpha})")
    return EXIT_OK


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "predict": cmd_predict,
    "export-rules": cmd_export_rules,
    "grid-search": cmd_grid_search,
    "experiment": cmd_experiment,
    "stats": cmd_stats,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # argparse exits itself for --help; keep its code for that path
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DrnetError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # defensive: anything unexpected is internal
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
