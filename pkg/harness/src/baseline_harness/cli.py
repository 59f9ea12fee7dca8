"""Command line for the baseline harness.

``run`` evaluates the baselines on drnet-emitted datasets and folds;
``merge`` joins the resulting report with the primary one.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .merge import merge_reports
from .report_io import ReportError
from .runner import available_baselines, run_baselines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drnet-baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate baselines on emitted datasets")
    p.add_argument("--data", required=True, help="directory of dataset CSVs")
    p.add_argument("--folds", required=True, help="directory of fold-index files")
    p.add_argument("--out", required=True, help="baseline report path")
    p.add_argument("--baselines", help="comma-separated subset, e.g. CART")
    p.add_argument("--suite", default="artificial")

    p = sub.add_parser("merge", help="join a primary report with a baseline one")
    p.add_argument("primary")
    p.add_argument("baseline")
    p.add_argument("--out", required=True)

    sub.add_parser("list", help="print the baselines available here")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            subset = args.baselines.split(",") if args.baselines else None
            rows = run_baselines(args.data, args.folds, args.out,
                                 baselines=subset, suite=args.suite)
            names = sorted({r.baseline for r in rows})
            for name in names:
                means = [r.mean_accuracy for r in rows if r.baseline == name]
                print(f"{name}: mean accuracy {sum(means) / len(means):.4f} "
                      f"over {len(means)} datasets")
            print(f"report written to {args.out}")
        elif args.command == "merge":
            header, rows = merge_reports(args.primary, args.baseline, args.out)
            print(f"merged {len(rows)} datasets x {len(header) - 2} columns "
                  f"into {args.out}")
        else:
            for name in available_baselines():
                print(name)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
