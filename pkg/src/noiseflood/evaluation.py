"""Precision/recall/F1 evaluation and source-to-target recall matrices.

The adversarial class is the positive class throughout. Zero-denominator
precision or recall is reported as an explicit ``None`` ("undefined") instead
of silently collapsing to 0 or 1; F1 is 0 whenever either side is undefined.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .validation import as_labels, as_score_matrix, labels_from_vectors


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_predictions(cls, predicted, truth) -> "ConfusionCounts":
        predicted = as_labels(predicted)
        truth = as_labels(truth, predicted.size)
        return cls(
            tp=int(np.sum(predicted & truth)),
            fp=int(np.sum(predicted & ~truth)),
            tn=int(np.sum(~predicted & ~truth)),
            fn=int(np.sum(~predicted & truth)),
        )


def precision(c: ConfusionCounts) -> float | None:
    declared = c.tp + c.fp
    return None if declared == 0 else c.tp / declared


def recall(c: ConfusionCounts) -> float | None:
    positives = c.tp + c.fn
    return None if positives == 0 else c.tp / positives


def f1_from_counts(c: ConfusionCounts) -> float:
    p, r = precision(c), recall(c)
    if p is None or r is None or p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def f1_score(predicted, truth) -> float:
    return f1_from_counts(ConfusionCounts.from_predictions(predicted, truth))


@dataclass(frozen=True)
class RecallMatrix:
    """Recall per (source, target) pair over the adversarial test rows.

    Cells without examples (including the whole diagonal, since adversarial
    rows always have source != target) are absent from ``detected``/``totals``.
    """

    labels: tuple[str, ...]
    detected: dict[tuple[str, str], int]
    totals: dict[tuple[str, str], int]

    def fraction(self, source: str, target: str) -> float | None:
        key = (source, target)
        if key not in self.totals:
            return None
        return self.detected[key] / self.totals[key]

    def percent(self, source: str, target: str) -> int | None:
        frac = self.fraction(source, target)
        if frac is None:
            return None
        return percent_half_up(frac)


def percent_half_up(fraction: float) -> int:
    return int(math.floor(fraction * 100 + 0.5))


@dataclass
class EvalReport:
    detector: str
    config_digest: str
    counts: ConfusionCounts
    precision: float | None
    recall: float | None
    f1: float
    matrix: RecallMatrix | None = None
    extra: dict = field(default_factory=dict)


def detector_identity(detector) -> tuple[str, str]:
    """Readable name plus a short digest of the detector's configuration."""
    name = type(detector).__name__
    try:
        params = detector.get_params()
    except AttributeError:
        params = {}
    digest = hashlib.sha256(
        json.dumps(params, sort_keys=True, default=repr).encode()
    ).hexdigest()[:12]
    return name, digest


def evaluate(detector, vectors, with_matrix: bool = False) -> EvalReport:
    """Score a fitted detector on labeled score vectors."""
    if not len(vectors):
        raise ValueError("test set is empty")
    X = as_score_matrix(vectors)
    y = labels_from_vectors(vectors)
    predicted = np.asarray(detector.predict(X), dtype=bool)
    counts = ConfusionCounts.from_predictions(predicted, y)
    name, digest = detector_identity(detector)
    report = EvalReport(
        detector=name,
        config_digest=digest,
        counts=counts,
        precision=precision(counts),
        recall=recall(counts),
        f1=f1_from_counts(counts),
    )
    if with_matrix:
        report.matrix = recall_matrix(detector, vectors)
    return report


def recall_matrix(detector, vectors) -> RecallMatrix:
    """Recall per (source, target) pair among the adversarial rows."""
    X = as_score_matrix(vectors)
    y = labels_from_vectors(vectors)
    predicted = np.asarray(detector.predict(X), dtype=bool)
    detected: dict[tuple[str, str], int] = {}
    totals: dict[tuple[str, str], int] = {}
    labels: set[str] = set()
    for vector, truth, pred in zip(vectors, y, predicted):
        if not truth:
            continue
        if not vector.source or not vector.target:
            raise ValueError("adversarial rows need source and target labels")
        key = (vector.source, vector.target)
        labels.update(key)
        totals[key] = totals.get(key, 0) + 1
        detected[key] = detected.get(key, 0) + int(pred)
    return RecallMatrix(labels=tuple(sorted(labels)), detected=detected, totals=totals)


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------

def _show(value: float | None, places: int = 4) -> str:
    return "undefined" if value is None else f"{value:.{places}f}"


def write_report(path, report: EvalReport, provenance: dict | None = None) -> None:
    """One human-readable report file per detector."""
    lines = [
        "noiseflood evaluation report v1",
        f"detector: {report.detector}",
        f"config_digest: {report.config_digest}",
        f"examples: {report.counts.total}",
        f"tp: {report.counts.tp}",
        f"fp: {report.counts.fp}",
        f"tn: {report.counts.tn}",
        f"fn: {report.counts.fn}",
        f"precision: {_show(report.precision)}",
        f"recall: {_show(report.recall)}",
        f"f1: {report.f1:.4f}",
    ]
    for key, value in sorted((provenance or {}).items()):
        lines.append(f"{key}: {value}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_recall_matrix_csv(path, matrix: RecallMatrix, raw: bool = False) -> None:
    """Matrix CSV: rows = source, columns = target; cells without examples blank.

    By default cells are percentages rounded half-up; ``raw=True`` writes the
    exact fractions instead.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source"] + list(matrix.labels))
        for source in matrix.labels:
            row = [source]
            for target in matrix.labels:
                if raw:
                    frac = matrix.fraction(source, target)
                    row.append("" if frac is None else repr(frac))
                else:
                    pct = matrix.percent(source, target)
                    row.append("" if pct is None else pct)
            writer.writerow(row)


def write_comparison_csv(path, reports: list[EvalReport]) -> None:
    """Side-by-side method comparison, one row per detector."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "precision", "recall", "f1"])
        for report in reports:
            writer.writerow(
                [
                    report.detector,
                    _show(report.precision),
                    _show(report.recall),
                    f"{report.f1:.4f}",
                ]
            )
