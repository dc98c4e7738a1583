"""Metrics, one-vs-all collapse, mask thresholding and part aggregation."""

from sdds_lab.evaluation.aggregate import aggregate_part, aggregate_parts
from sdds_lab.evaluation.metrics import binary_report, compute_metrics, one_vs_all_collapse
from sdds_lab.evaluation.thresholds import mask_to_binary, optimize_threshold

__all__ = [
    "aggregate_part",
    "aggregate_parts",
    "binary_report",
    "compute_metrics",
    "mask_to_binary",
    "one_vs_all_collapse",
    "optimize_threshold",
]
