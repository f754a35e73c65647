"""Leaderboard construction, direction-aware ranking, worst-file analysis
and chart-data export.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .fileio import atomic_write_text
from .metrics import (
    Direction,
    METRIC_NAMES,
    METRIC_SPECS,
    MetricSpec,
    MetricVector,
    aggregate,
)

# Default shape of the worst-file procedure: bottom ten per metric, flag
# files present in more than four of the eight lists.
DEFAULT_WORST_N = 10
DEFAULT_WORST_THRESHOLD = 4


@dataclass(frozen=True)
class LeaderboardRow:
    """One run and its eight aggregate scores."""

    team_run: str
    scores: MetricVector


@dataclass(frozen=True)
class WorstFileReport:
    """Bottom-N lists per metric plus the files flagged across lists."""

    per_metric_bottom: dict[str, list[str]]
    flagged: list[tuple[str, int]]
    n: int
    threshold: int


def rank(rows: Sequence[LeaderboardRow], metric: MetricSpec) -> list[LeaderboardRow]:
    """Order rows best-first on one metric.

    Ascending for lower-is-better metrics, descending otherwise; exact ties
    fall back to the run identifier so the order is total.
    """
    if metric.direction is Direction.LOWER_IS_BETTER:
        key = lambda row: (row.scores.get(metric.name), row.team_run)
    else:
        key = lambda row: (-row.scores.get(metric.name), row.team_run)
    return sorted(rows, key=key)


def worst_files(
    per_file_scores: Mapping[str, MetricVector],
    n: int = DEFAULT_WORST_N,
    threshold: int = DEFAULT_WORST_THRESHOLD,
) -> WorstFileReport:
    """Bottom-n files per metric and the ids appearing in > threshold lists.

    Worst means highest for error metrics and lowest for overlap metrics.
    Ties break on file id; flagged ids sort by descending count, then id.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    per_metric_bottom: dict[str, list[str]] = {}
    appearance: Counter = Counter()
    for spec in METRIC_SPECS:
        if spec.direction is Direction.LOWER_IS_BETTER:
            key = lambda item: (-item[1].get(spec.name), item[0])
        else:
            key = lambda item: (item[1].get(spec.name), item[0])
        ordered = sorted(per_file_scores.items(), key=key)
        bottom = [doc_id for doc_id, _ in ordered[:n]]
        per_metric_bottom[spec.name] = bottom
        appearance.update(bottom)
    flagged = sorted(
        ((doc_id, count) for doc_id, count in appearance.items() if count > threshold),
        key=lambda item: (-item[1], item[0]),
    )
    return WorstFileReport(
        per_metric_bottom=per_metric_bottom,
        flagged=flagged,
        n=n,
        threshold=threshold,
    )


def export_scatter(rows: Sequence[LeaderboardRow], out: Path) -> int:
    """Write (metric, rank, run, value) rows, best-first per metric.

    Returns the data row count (|runs| x 8).
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["metric", "rank", "run", "value"])
    count = 0
    for spec in METRIC_SPECS:
        for position, row in enumerate(rank(rows, spec), start=1):
            writer.writerow(
                [spec.column, position, row.team_run, repr(row.scores.get(spec.name))]
            )
            count += 1
    atomic_write_text(Path(out), buffer.getvalue())
    return count


def write_leaderboard_csv(
    rows: Sequence[LeaderboardRow], out: Path, display: bool = False
) -> None:
    """Write a leaderboard CSV in canonical column order.

    display=True rounds to 4 decimals (table style); otherwise values keep
    full precision.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["TEAM"] + [spec.column for spec in METRIC_SPECS])
    for row in rows:
        values = [
            f"{row.scores.get(name):.4f}" if display else repr(row.scores.get(name))
            for name in METRIC_NAMES
        ]
        writer.writerow([row.team_run] + values)
    atomic_write_text(Path(out), buffer.getvalue())


def format_leaderboard_table(rows: Sequence[LeaderboardRow]) -> str:
    """Aligned plain-text leaderboard with 4-decimal display rounding."""
    header = ["TEAM"] + [spec.column for spec in METRIC_SPECS]
    body = [
        [row.team_run] + [f"{row.scores.get(name):.4f}" for name in METRIC_NAMES]
        for row in rows
    ]
    widths = [
        max(len(line[col]) for line in [header] + body) for col in range(len(header))
    ]
    lines = []
    for line in [header] + body:
        cells = [
            line[0].ljust(widths[0]),
            *(cell.rjust(width) for cell, width in zip(line[1:], widths[1:])),
        ]
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def _vector_from_row(row: Mapping[str, str], where: str) -> MetricVector:
    values = {}
    for spec in METRIC_SPECS:
        cell = row.get(spec.column)
        if cell is None:
            raise ValueError(f"missing column {spec.column} in {where}")
        values[spec.name] = float(cell)
    return MetricVector(**values)


def read_leaderboard_csv(path: Path) -> list[LeaderboardRow]:
    """Read an aggregate leaderboard CSV (TEAM + eight metric columns)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValueError(f"empty leaderboard file: {path}")
        fieldnames = list(reader.fieldnames)
        rows = []
        for record in reader:
            rows.append(
                LeaderboardRow(
                    team_run=record[fieldnames[0]],
                    scores=_vector_from_row(record, str(path)),
                )
            )
    return rows


def write_per_file_csv(scores: Mapping[str, MetricVector], out: Path) -> None:
    """Write per-file scores (file_id + eight metric columns), id-sorted,
    full precision."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["file_id"] + [spec.column for spec in METRIC_SPECS])
    for doc_id in sorted(scores):
        vector = scores[doc_id]
        writer.writerow([doc_id] + [repr(vector.get(name)) for name in METRIC_NAMES])
    atomic_write_text(Path(out), buffer.getvalue())


def read_per_file_csv(path: Path) -> dict[str, MetricVector]:
    """Read a per-file scores CSV written by write_per_file_csv."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValueError(f"empty scores file: {path}")
        id_column = reader.fieldnames[0]
        scores = {}
        for record in reader:
            doc_id = record[id_column]
            if doc_id in scores:
                raise ValueError(f"duplicate file id {doc_id!r} in {path}")
            scores[doc_id] = _vector_from_row(record, str(path))
    return scores


def row_from_per_file(team_run: str, path: Path) -> LeaderboardRow:
    """Aggregate a per-file scores CSV into one leaderboard row."""
    scores = read_per_file_csv(path)
    if not scores:
        raise ValueError(f"no score rows in {path}")
    return LeaderboardRow(team_run=team_run, scores=aggregate(scores.values()))
