"""Figure specifications and CSV schema validation.

Two CSV families are understood, matching the experiment CLI's outputs:

phase  — header: <axis1>,<axis2>,m,trials,successes,rate
noise  — header: nu,m_ratio,median_snr_db,median_amp

A figure spec is a small JSON object:

    {
      "input": "grid.csv",
      "family": "phase",
      "output": "grid.png",
      "xlabel": "sparsity",          (optional)
      "ylabel": "measurements",      (optional)
      "title": "...",                (optional)
      "overlay": {"n2": 4, "label": "fundamental limit"}   (optional)
    }

The overlay draws the recovery limit line m = s + n2 - 2 in the grid's own
coordinates; its placement is computed from the axis values found in the
CSV, never from assumptions about grid size.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

FAMILIES = ("phase", "noise")

PHASE_FIXED_COLUMNS = ("m", "trials", "successes", "rate")
NOISE_COLUMNS = ("nu", "m_ratio", "median_snr_db", "median_amp")


class SchemaError(ValueError):
    """The CSV does not match the documented experiment schema."""


@dataclass(frozen=True)
class FigureSpec:
    input: str
    family: str
    output: str
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    title: Optional[str] = None
    overlay: Optional[dict] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown figure family {self.family!r}")
        if self.overlay is not None:
            if "n2" not in self.overlay:
                raise ValueError("overlay requires the fixed dimension 'n2'")
            if int(self.overlay["n2"]) < 1:
                raise ValueError("overlay n2 must be a positive integer")


def load_spec(path):
    """Read a FigureSpec from a JSON file."""
    with open(path) as fh:
        data = json.load(fh)
    unknown = set(data) - {
        "input",
        "family",
        "output",
        "xlabel",
        "ylabel",
        "title",
        "overlay",
    }
    if unknown:
        raise ValueError(f"unknown spec fields: {sorted(unknown)}")
    for required in ("input", "family", "output"):
        if required not in data:
            raise ValueError(f"spec is missing required field {required!r}")
    return FigureSpec(**data)


@dataclass(frozen=True)
class PhaseTable:
    """Parsed phase-transition grid: axis names plus one row per cell."""

    axis1: str
    axis2: str
    rows: tuple  # of (axis1 value, axis2 value, rate)


@dataclass(frozen=True)
class NoiseTable:
    rows: tuple  # of dicts with the noise columns


def read_phase_csv(path):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        if len(header) != 6 or tuple(header[2:]) != PHASE_FIXED_COLUMNS:
            missing = [c for c in PHASE_FIXED_COLUMNS if c not in header[2:]]
            raise SchemaError(
                f"{path} is not a phase-transition CSV: missing column(s) "
                f"{missing or header}"
            )
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 6:
                raise SchemaError(f"{path}:{lineno}: expected 6 fields")
            try:
                rate = float(rec[5])
                rows.append((float(rec[0]), float(rec[1]), rate))
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: non-numeric value") from None
            if not 0.0 <= rate <= 1.0:
                raise SchemaError(f"{path}:{lineno}: rate {rate} outside [0, 1]")
    if not rows:
        raise SchemaError(f"{path} contains no data rows")
    return PhaseTable(header[0], header[1], tuple(rows))


def read_noise_csv(path):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        if tuple(header) != NOISE_COLUMNS:
            missing = [c for c in NOISE_COLUMNS if c not in header]
            raise SchemaError(
                f"{path} is not a noise-sweep CSV: missing column(s) "
                f"{missing or header}"
            )
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 4:
                raise SchemaError(f"{path}:{lineno}: expected 4 fields")
            try:
                rows.append(dict(zip(NOISE_COLUMNS, map(float, rec))))
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: non-numeric value") from None
    if not rows:
        raise SchemaError(f"{path} contains no data rows")
    return NoiseTable(tuple(rows))
