"""Classification metrics and the one-vs-all collapse."""

from typing import Optional, Sequence

import numpy as np

from sdds_lab.models import AveragingMode, MetricsReport


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def _f1(precision: float, recall: float) -> float:
    return _ratio(2 * precision * recall, precision + recall)


def compute_metrics(
    predictions: Sequence[int],
    labels: Sequence[int],
    mode: AveragingMode = AveragingMode.BINARY,
    num_classes: Optional[int] = None,
) -> MetricsReport:
    """Accuracy, precision, recall and F1 of predicted class ids.

    Binary mode treats class 1 (defective) as positive. Macro mode averages
    per-class precision, recall and F1 without weighting. A ratio with a zero
    denominator is 0.

    Args:
        predictions: Predicted class ids
        labels: True class ids
        mode: ``binary`` or ``macro``
        num_classes: Class count for macro mode; inferred from the data when omitted

    Returns:
        MetricsReport; ``confusion[i][j]`` counts label ``i`` predicted as ``j``

    Examples:
        >>> r = compute_metrics([1, 0, 1, 0], [1, 1, 0, 0])
        >>> r.accuracy, r.precision, r.recall, r.f1
        (0.5, 0.5, 0.5, 0.5)
        >>> compute_metrics([1, 1, 0, 0], [1, 1, 0, 0]).f1
        1.0
        >>> compute_metrics([0, 2], [0, 1], mode=AveragingMode.MACRO, num_classes=3).accuracy
        0.5
    """
    preds = np.asarray(predictions, dtype=np.int64).ravel()
    truth = np.asarray(labels, dtype=np.int64).ravel()
    if preds.shape != truth.shape:
        raise ValueError(f"length mismatch: {preds.size} predictions, {truth.size} labels")
    if preds.size == 0:
        raise ValueError("metrics need at least one prediction")

    if mode == AveragingMode.BINARY:
        classes = 2
    else:
        classes = num_classes if num_classes is not None else int(max(preds.max(), truth.max())) + 1
    for name, values in (("prediction", preds), ("label", truth)):
        if values.min() < 0 or values.max() >= classes:
            raise ValueError(f"unknown class in {name}s: expected ids in [0, {classes})")

    confusion = np.zeros((classes, classes), dtype=np.int64)
    np.add.at(confusion, (truth, preds), 1)
    accuracy = float(np.trace(confusion)) / preds.size

    if mode == AveragingMode.BINARY:
        tp, fp, fn = confusion[1, 1], confusion[0, 1], confusion[1, 0]
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = _f1(precision, recall)
    else:
        per_class = []
        for c in range(classes):
            tp = confusion[c, c]
            p = _ratio(tp, confusion[:, c].sum())
            r = _ratio(tp, confusion[c, :].sum())
            per_class.append((p, r, _f1(p, r)))
        precision, recall, f1 = (float(np.mean(column)) for column in zip(*per_class))

    return MetricsReport(
        accuracy=accuracy,
        precision=float(precision),
        recall=float(recall),
        f1=float(f1),
        mode=mode,
        confusion=confusion.tolist(),
        support=int(preds.size),
    )


def one_vs_all_collapse(
    predictions: Sequence[int], labels: Sequence[int]
) -> tuple[list[int], list[int]]:
    """Map class 0 to 0 and every defect class to 1 for predictions and labels.

    Examples:
        >>> one_vs_all_collapse([3, 0, 0], [1, 2, 0])
        ([1, 0, 0], [1, 1, 0])
    """
    return [int(p > 0) for p in predictions], [int(y > 0) for y in labels]


def binary_report(predictions: Sequence[int], labels: Sequence[int]) -> MetricsReport:
    """Binary metrics after collapsing any class ids one-vs-all."""
    preds, truth = one_vs_all_collapse(predictions, labels)
    return compute_metrics(preds, truth, AveragingMode.BINARY)
