"""Baselines for drnet reports: CART-style decision trees and, when the
optional wittgenstein package is installed, RIPPER.

The harness never splits data itself: it consumes the fold-index files
published by the primary tooling, so baseline accuracies are measured on
exactly the same train/test halves.
"""

from .runner import BaselineRow, available_baselines, run_baselines
from .merge import merge_reports

__all__ = ["BaselineRow", "available_baselines", "run_baselines", "merge_reports"]
