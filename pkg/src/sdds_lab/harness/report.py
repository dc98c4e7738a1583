"""Comparison table and CSV export of grid summaries."""

import csv
import io
from typing import Literal, Optional

from sdds_lab.harness.scenarios import experiment_order
from sdds_lab.models import GridResult, MetricValues, ScenarioSummary

ReportFormat = Literal["table", "csv"]

METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1")
METRIC_HEADERS = ("Accuracy", "Precision", "Recall", "F1")
CSV_FIELDS = (
    ["experiment_id", "information_value", "knowledge_transfer"]
    + [name for metric in METRIC_COLUMNS for name in (metric, f"{metric}_spread")]
    + ["binary_f1", "stop_epoch", "focus_ratio", "seeds", "failed_seeds"]
)


def _ordered(summaries: list[ScenarioSummary]) -> list[ScenarioSummary]:
    if not summaries:
        raise ValueError("nonempty results required")
    return sorted(summaries, key=lambda s: experiment_order(s.experiment_id))


def format_table(result: GridResult) -> str:
    """Fixed-width table in E1..E8 order, one section per information value.

    Each cell reads ``mean ± spread`` with three decimals, followed by the
    hypothesis checks.

    Raises:
        ValueError: if the result has no summaries
    """
    summaries = _ordered(result.summaries)
    header = f"{'Exp':<4} {'Output':<13} {'Transfer':<11}" + "".join(
        f" {h:>15}" for h in METRIC_HEADERS
    )
    rule = "-" * len(header)
    lines = [header, rule]
    previous = summaries[0].information_value
    for summary in summaries:
        if summary.information_value != previous:
            lines.append(rule)
            previous = summary.information_value
        cells = "".join(
            f" {f'{getattr(summary.mean, m):.3f} ± {getattr(summary.spread, m):.3f}':>15}"
            for m in METRIC_COLUMNS
        )
        lines.append(
            f"{summary.experiment_id:<4} {summary.information_value.value:<13} "
            f"{summary.knowledge_transfer.value:<11}{cells}"
        )
    lines.append(rule)
    for check in result.hypotheses:
        lines.append(f"[{'holds' if check.holds else 'fails'}] {check.name}: {check.detail}")
    failed = result.failed_runs()
    if failed:
        lines.append("Failed: " + ", ".join(f"{r.experiment_id}/seed{r.seed}" for r in failed))
    return "\n".join(lines) + "\n"


def _optional(value: str) -> Optional[float]:
    return float(value) if value else None


def _seeds(value: str) -> list[int]:
    return [int(seed) for seed in value.split()]


def format_csv(result: GridResult) -> str:
    """One CSV row per summary; floats are written with full precision.

    Raises:
        ValueError: if the result has no summaries
    """
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for summary in _ordered(result.summaries):
        row: dict[str, object] = {
            "experiment_id": summary.experiment_id,
            "information_value": summary.information_value.value,
            "knowledge_transfer": summary.knowledge_transfer.value,
            "binary_f1": repr(summary.mean_binary_f1),
            "stop_epoch": "" if summary.mean_stop_epoch is None else repr(summary.mean_stop_epoch),
            "focus_ratio": ""
            if summary.median_focus_ratio is None
            else repr(summary.median_focus_ratio),
            "seeds": " ".join(str(s) for s in summary.seeds),
            "failed_seeds": " ".join(str(s) for s in summary.failed_seeds),
        }
        for metric in METRIC_COLUMNS:
            row[metric] = repr(getattr(summary.mean, metric))
            row[f"{metric}_spread"] = repr(getattr(summary.spread, metric))
        writer.writerow(row)
    return out.getvalue()


def parse_csv_report(text: str) -> list[ScenarioSummary]:
    """Read summaries back from ``format_csv`` output."""
    summaries = []
    for row in csv.DictReader(io.StringIO(text)):
        summaries.append(
            ScenarioSummary(
                experiment_id=row["experiment_id"],
                information_value=row["information_value"],
                knowledge_transfer=row["knowledge_transfer"],
                mean=MetricValues(**{m: float(row[m]) for m in METRIC_COLUMNS}),
                spread=MetricValues(**{m: float(row[f"{m}_spread"]) for m in METRIC_COLUMNS}),
                mean_binary_f1=float(row["binary_f1"]),
                mean_stop_epoch=_optional(row["stop_epoch"]),
                median_focus_ratio=_optional(row["focus_ratio"]),
                seeds=_seeds(row["seeds"]),
                failed_seeds=_seeds(row["failed_seeds"]),
            )
        )
    return summaries


def report(result: GridResult, fmt: ReportFormat = "table") -> str:
    """Render ``result`` as a ``table`` or ``csv``.

    Examples:
        >>> report(GridResult())
        Traceback (most recent call last):
        ...
        ValueError: nonempty results required
    """
    if fmt == "csv":
        return format_csv(result)
    if fmt == "table":
        return format_table(result)
    raise ValueError(f"unknown report format '{fmt}'")
