"""Reading and writing the primary report dialect: CSV tables preceded by
``# key=value`` comment lines."""

from __future__ import annotations

import csv
import io
import os
from typing import Dict, List, Tuple


class ReportError(ValueError):
    pass


def read_report(path: str) -> Tuple[Dict[str, str], List[str], List[dict]]:
    """Returns (meta, column names, row dicts)."""
    if not os.path.exists(path):
        raise ReportError(f"report not found: {path}")
    meta: Dict[str, str] = {}
    body = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                if "=" in line:
                    key, value = line[1:].strip().split("=", 1)
                    meta[key.strip()] = value.strip()
            else:
                body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise ReportError(f"empty report: {path}")
    header = rows[0]
    out = [dict(zip(header, row)) for row in rows[1:] if row]
    return meta, header, out


def write_report(path: str, meta: Dict[str, str], header: List[str],
                 rows: List[List[str]]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}={meta[key]}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def read_folds(path: str) -> Tuple[str, Dict[int, int]]:
    """Fold-index file: ``# protocol=...`` then row,fold pairs."""
    if not os.path.exists(path):
        raise ReportError(
            f"fold-index file missing: {path}; run the primary experiment "
            "first (the harness never splits data itself)"
        )
    protocol = ""
    body = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                if "protocol=" in line:
                    protocol = line.split("protocol=", 1)[1].strip()
            else:
                body.append(line)
    rows = list(csv.reader(body))
    if not rows or rows[0] != ["row", "fold"]:
        raise ReportError(f"malformed fold-index file: {path}")
    assignment = {int(r): int(f) for r, f in rows[1:] if r}
    if set(assignment.values()) - {0, 1}:
        raise ReportError(f"fold-index file has folds outside 0/1: {path}")
    return protocol, assignment
