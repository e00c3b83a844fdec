"""Accuracy and Type I / Type II error counts, and the side-by-side comparison table.

Type I error: a distressed company (+1) predicted healthy (-1).
Type II error: a healthy company (-1) predicted distressed (+1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class SampleRecord:
    index: int
    label: int
    predicted: int


@dataclass(frozen=True)
class EvaluationReport:
    n: int
    type1_count: int
    type2_count: int
    records: tuple[SampleRecord, ...]

    @property
    def errors(self) -> int:
        return self.type1_count + self.type2_count

    @property
    def accuracy(self) -> float:
        return 1.0 - self.errors / self.n

    @property
    def type1_rate(self) -> float:
        return self.type1_count / self.n

    @property
    def type2_rate(self) -> float:
        return self.type2_count / self.n

    @property
    def correct(self) -> int:
        return self.n - self.errors

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "type1_count": self.type1_count,
            "type2_count": self.type2_count,
            "type1_rate": self.type1_rate,
            "type2_rate": self.type2_rate,
            "errors": self.errors,
            "accuracy": self.accuracy,
            "records": [
                {"index": r.index, "label": r.label, "predicted": r.predicted} for r in self.records
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def evaluate(predictions: Sequence[int], labels: Sequence[int]) -> EvaluationReport:
    predictions = [int(p) for p in predictions]
    labels = [int(t) for t in labels]
    if len(predictions) != len(labels):
        raise EvaluationError(
            f"length mismatch: {len(predictions)} predictions vs {len(labels)} labels"
        )
    if not labels:
        raise EvaluationError("empty input")
    for v in (*predictions, *labels):
        if v not in (1, -1):
            raise EvaluationError(f"labels and predictions must be +1 or -1, got {v}")
    type1 = sum(1 for p, t in zip(predictions, labels) if t == 1 and p == -1)
    type2 = sum(1 for p, t in zip(predictions, labels) if t == -1 and p == 1)
    records = tuple(SampleRecord(i, t, p) for i, (p, t) in enumerate(zip(predictions, labels)))
    return EvaluationReport(len(labels), type1, type2, records)


def _fraction(count: int, n: int) -> str:
    return f"{count}/{n} ({100.0 * count / n:.1f}%)"


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    n: int
    type1: int
    type2: int
    errors: int
    accuracy: float

    def cells(self) -> list[str]:
        return [
            self.method,
            str(self.n),
            _fraction(self.type1, self.n),
            _fraction(self.type2, self.n),
            _fraction(self.errors, self.n),
            f"{100.0 * self.accuracy:.1f}%",
        ]


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    HEADER = ("Method", "Number of sample", "Type I error", "Type II error", "Error", "Accuracy")

    def render(self) -> str:
        table = [list(self.HEADER)] + [r.cells() for r in self.rows]
        widths = [max(len(row[c]) for row in table) for c in range(len(self.HEADER))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines)

    def to_dict(self) -> list[dict]:
        return [
            {
                "method": r.method,
                "n": r.n,
                "type1": r.type1,
                "type2": r.type2,
                "errors": r.errors,
                "accuracy": r.accuracy,
            }
            for r in self.rows
        ]


def compare(reports: Sequence[tuple[str, EvaluationReport]]) -> ComparisonTable:
    if not reports:
        raise EvaluationError("nothing to compare")
    rows = tuple(
        ComparisonRow(name, r.n, r.type1_count, r.type2_count, r.errors, r.accuracy)
        for name, r in reports
    )
    return ComparisonTable(rows)
