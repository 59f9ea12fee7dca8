"""Join a primary network report with a baseline report into one table."""

from __future__ import annotations

import os
from typing import List, Tuple

from .report_io import ReportError, read_report, write_report


def merge_reports(primary_path: str, baseline_path: str,
                  out_path: str) -> Tuple[List[str], List[List[str]]]:
    """Single table in the benchmark layout: dataset, positive ratio, the
    network columns, then the baseline columns.  Dataset ids must match
    exactly and both reports must carry the same fold protocol.
    """
    p_meta, p_header, p_rows = read_report(primary_path)
    b_meta, b_header, b_rows = read_report(baseline_path)

    if p_meta.get("protocol") != b_meta.get("protocol"):
        raise ReportError(
            f"fold protocol mismatch: {p_meta.get('protocol')!r} vs "
            f"{b_meta.get('protocol')!r}"
        )

    p_ids = [r["dataset"] for r in p_rows]
    b_ids = [r["dataset"] for r in b_rows]
    unmatched = sorted(set(p_ids) ^ set(b_ids))
    if unmatched:
        raise ReportError(f"dataset ids do not match: {unmatched}")

    model_cols = [c for c in p_header if c not in ("dataset", "pos_ratio")]
    baseline_cols = [c for c in b_header if c != "dataset"]
    by_id = {r["dataset"]: r for r in b_rows}

    header = ["dataset", "pos_ratio", *model_cols, *baseline_cols]
    rows = []
    marked = []
    for row in p_rows:
        d = row["dataset"]
        cells = [d, row.get("pos_ratio", "")]
        cells += [row[c] for c in model_cols]
        cells += [by_id[d][c] for c in baseline_cols]
        rows.append(cells)
        # best-per-row marking among the network columns, table style
        values = [float(row[c]) for c in model_cols]
        best = max(values)
        marked.append(
            [d, row.get("pos_ratio", "")]
            + [f"{v:.4f}" + ("*" if v == best else "") for v in values]
            + [by_id[d][c] for c in baseline_cols]
        )

    meta = {"suite": p_meta.get("suite", ""), "protocol": p_meta["protocol"]}
    write_report(out_path, meta, header, rows)

    txt_path = os.path.splitext(out_path)[0] + ".txt"
    widths = [max(14, len(h) + 2) for h in header]
    with open(txt_path, "w") as fh:
        fh.write("".join(h.ljust(w) for h, w in zip(header, widths)) + "\n")
        for cells in marked:
            fh.write("".join(str(c).ljust(w) for c, w in zip(cells, widths)) + "\n")
    return header, rows
