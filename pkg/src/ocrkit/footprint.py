"""Energy and CO2 accounting for runs, per run and per example.

The model is duration x average power; cloud-hosted runs where power draw
cannot be observed are stored as duration-only records with energy marked
unavailable.
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .fileio import atomic_write_text


class Phase(Enum):
    FINE_TUNE = "fine_tune"
    INFERENCE = "inference"


@dataclass(frozen=True)
class FootprintEstimate:
    """Energy/CO2 record for one run phase.

    energy_kwh and co2_kg are None for duration-only records (cloud runs
    whose power draw is unobservable).
    """

    run_label: str
    phase: Phase
    duration_s: float
    energy_kwh: float | None
    co2_kg: float | None
    n_examples: int | None = None

    def __post_init__(self) -> None:
        if self.duration_s < 0:
            raise ValueError("duration_s must be >= 0")
        if (self.energy_kwh is None) != (self.co2_kg is None):
            raise ValueError("energy_kwh and co2_kg must be both set or both unset")
        if self.energy_kwh is not None and self.energy_kwh < 0:
            raise ValueError("energy_kwh must be >= 0")
        if self.co2_kg is not None and self.co2_kg < 0:
            raise ValueError("co2_kg must be >= 0")
        if self.n_examples is not None and self.n_examples < 1:
            raise ValueError("n_examples must be >= 1 when given")

    @property
    def energy_available(self) -> bool:
        return self.energy_kwh is not None


def estimate(
    duration_s: float,
    avg_power_w: float,
    carbon_intensity: float,
    n_examples: int | None = None,
    run_label: str = "",
    phase: Phase = Phase.INFERENCE,
) -> FootprintEstimate:
    """energy_kwh = duration_s/3600 x avg_power_w/1000; co2 = energy x intensity."""
    if duration_s < 0 or avg_power_w < 0 or carbon_intensity < 0:
        raise ValueError("duration, power and carbon intensity must be >= 0")
    energy_kwh = (duration_s / 3600.0) * (avg_power_w / 1000.0)
    return FootprintEstimate(
        run_label=run_label,
        phase=phase,
        duration_s=duration_s,
        energy_kwh=energy_kwh,
        co2_kg=energy_kwh * carbon_intensity,
        n_examples=n_examples,
    )


def duration_only(
    run_label: str, phase: Phase, duration_s: float, n_examples: int | None = None
) -> FootprintEstimate:
    """Record for a run whose energy cannot be measured (hosted service)."""
    return FootprintEstimate(
        run_label=run_label,
        phase=phase,
        duration_s=duration_s,
        energy_kwh=None,
        co2_kg=None,
        n_examples=n_examples,
    )


def per_example(record: FootprintEstimate) -> tuple[float, float]:
    """(kWh, kg CO2) per example; requires a measured record with examples."""
    if record.n_examples is None or record.n_examples < 1:
        raise ValueError("per-example figures need n_examples >= 1")
    if record.energy_kwh is None or record.co2_kg is None:
        raise ValueError("per-example figures need a measured energy record")
    return record.energy_kwh / record.n_examples, record.co2_kg / record.n_examples


_CSV_HEADER = ["run", "phase", "duration_s", "energy_kwh", "co2_kg", "n_examples"]


def _estimate_to_row(record: FootprintEstimate) -> list[str]:
    return [
        record.run_label,
        record.phase.value,
        repr(record.duration_s),
        "" if record.energy_kwh is None else repr(record.energy_kwh),
        "" if record.co2_kg is None else repr(record.co2_kg),
        "" if record.n_examples is None else str(record.n_examples),
    ]


def write_estimate_log(records: Sequence[FootprintEstimate], out: Path) -> None:
    """Write the full estimate log (header + one row per record)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for record in records:
        writer.writerow(_estimate_to_row(record))
    atomic_write_text(Path(out), buffer.getvalue())


def read_estimate_log(path: Path) -> list[FootprintEstimate]:
    """Read an estimate log back."""
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            records.append(
                FootprintEstimate(
                    run_label=row["run"],
                    phase=Phase(row["phase"]),
                    duration_s=float(row["duration_s"]),
                    energy_kwh=float(row["energy_kwh"]) if row["energy_kwh"] else None,
                    co2_kg=float(row["co2_kg"]) if row["co2_kg"] else None,
                    n_examples=int(row["n_examples"]) if row["n_examples"] else None,
                )
            )
    return records


class EstimateLog:
    """Append-only estimate log backed by a CSV file.

    Appends are serialized under a lock; the whole file is rewritten
    atomically so concurrent readers never see a torn row.
    """

    def __init__(self, path: Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: FootprintEstimate) -> None:
        with self._lock:
            records = read_estimate_log(self.path) if self.path.is_file() else []
            records.append(record)
            write_estimate_log(records, self.path)

    def read(self) -> list[FootprintEstimate]:
        if not self.path.is_file():
            return []
        return read_estimate_log(self.path)


def log_scale_export(records: Iterable[FootprintEstimate], out: Path) -> int:
    """Write chart data with raw and log10 values per (run, phase, quantity).

    Quantities are total and per-example energy and CO2. Zeros keep their
    raw value with an empty log10 cell; unavailable quantities emit empty
    cells for both. Returns the data row count.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["run", "phase", "quantity", "value", "log10"])
    count = 0
    for record in records:
        quantities: list[tuple[str, float | None]] = [
            ("energy_kwh", record.energy_kwh),
            ("co2_kg", record.co2_kg),
        ]
        if record.n_examples is not None and record.energy_available:
            kwh_each, kg_each = per_example(record)
            quantities.append(("energy_kwh_per_example", kwh_each))
            quantities.append(("co2_kg_per_example", kg_each))
        for quantity, value in quantities:
            if value is None:
                writer.writerow([record.run_label, record.phase.value, quantity, "", ""])
            elif value == 0:
                writer.writerow(
                    [record.run_label, record.phase.value, quantity, repr(value), ""]
                )
            else:
                writer.writerow(
                    [
                        record.run_label,
                        record.phase.value,
                        quantity,
                        repr(value),
                        repr(math.log10(value)),
                    ]
                )
            count += 1
    atomic_write_text(Path(out), buffer.getvalue())
    return count
