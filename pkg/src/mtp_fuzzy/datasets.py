"""CSV datasets and the packaged precipitation / security-situation fixtures.

Dataset files have a header row ``label,x1,...,xs,target``.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DatasetParseError, MetricUndefinedError

FIXTURES = {
    "precipitation": ("precipitation.csv", 2),
    "security": ("security.csv", 3),
}

# sha256 of the shipped files; bump together with any fixture edit
FIXTURE_DIGESTS = {
    "precipitation.csv": "524aaa03974dc0cebacea85a4a8c96acb123a3ade0d45071b6e649c461781181",
    "security.csv": "0c52883057b2a1ee2b6790d91a728f989e6b5c48fa377e7f86904f4da5b545a3",
    "precipitation_published.csv": "5a219eef6a275161e3c6b412648d00c4568aa44fafa9b1f5dacf3faa058acc11",
}


@dataclass(frozen=True)
class Record:
    inputs: tuple[float, ...]
    target: float
    label: str = ""


@dataclass(frozen=True)
class Dataset:
    name: str
    arity: int
    records: tuple[Record, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if not self.records:
            raise DatasetParseError(f"dataset {self.name!r} has no records")
        for r in self.records:
            if len(r.inputs) != self.arity:
                raise DatasetParseError(f"record {r.label!r} has {len(r.inputs)} inputs, expected {self.arity}")

    def __len__(self):
        return len(self.records)

    @property
    def inputs(self) -> np.ndarray:
        return np.array([r.inputs for r in self.records], dtype=float)

    @property
    def targets(self) -> np.ndarray:
        return np.array([r.target for r in self.records], dtype=float)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.records]

    def with_values(self, inputs: np.ndarray, targets: np.ndarray, name: Optional[str] = None) -> "Dataset":
        records = [
            Record(tuple(float(v) for v in x), float(t), r.label)
            for x, t, r in zip(inputs, targets, self.records)
        ]
        return Dataset(name or self.name, self.arity, records)


def parse_dataset(text: str, name: str = "dataset", arity: Optional[int] = None) -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DatasetParseError(f"{name}: empty file", line=1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 3 or header[0] != "label" or header[-1] != "target":
        raise DatasetParseError(f"{name}: header must be label,x1,...,xs,target", line=1)
    ncols = len(header)
    file_arity = ncols - 2
    if arity is not None and arity != file_arity:
        raise DatasetParseError(f"{name}: expected arity {arity}, header has {file_arity} inputs", line=1)
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != ncols:
            raise DatasetParseError(f"expected {ncols} fields, got {len(row)}", line=lineno)
        try:
            values = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise DatasetParseError(str(exc), line=lineno) from None
        records.append(Record(tuple(values[:-1]), values[-1], row[0].strip()))
    if not records:
        raise DatasetParseError(f"{name}: no data rows", line=2)
    return Dataset(name, file_arity, records)


def load_dataset(path, arity: Optional[int] = None) -> Dataset:
    path = Path(path)
    return parse_dataset(path.read_text(encoding="utf-8"), path.stem, arity)


def fixture_bytes(filename: str) -> bytes:
    return resources.files("mtp_fuzzy.data").joinpath(filename).read_bytes()


def load_fixture(name: str) -> Dataset:
    filename, arity = FIXTURES[name]
    return parse_dataset(fixture_bytes(filename).decode("utf-8"), name, arity)


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def verify_fixtures() -> dict[str, bool]:
    return {f: digest(fixture_bytes(f)) == d for f, d in FIXTURE_DIGESTS.items()}


def load_published_results() -> list[dict]:
    """Published per-year results of both networks after 32 670 passes."""
    text = fixture_bytes("precipitation_published.csv").decode("utf-8")
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({k: (v if k == "label" else float(v)) for k, v in row.items()})
    return rows


def mape(targets: Sequence[float], results: Sequence[float]) -> float:
    """Mean absolute percentage error, in percent."""
    t = np.asarray(targets, dtype=float)
    r = np.asarray(results, dtype=float)
    if t.shape != r.shape:
        raise ValueError(f"length mismatch: {t.shape} vs {r.shape}")
    if np.any(t == 0):
        raise MetricUndefinedError("percentage error is undefined for a zero target")
    return float(100.0 * np.mean(np.abs(t - r) / np.abs(t)))
