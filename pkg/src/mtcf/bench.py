"""Sequential vs parallel wall-clock comparison with output checksums."""

from __future__ import annotations

import hashlib
import os
import platform
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ingest import Dataset
from .predict import Prediction, predict_all
from .similarity import SimilarityMeasure

PHASE_PREDICT = "similarity+predict"


class DigestMismatchError(RuntimeError):
    """Parallel output differed from the sequential baseline."""


@dataclass(frozen=True)
class BenchRecord:
    measure: str
    workers: int
    phase: str
    wall_ms: float
    n_test: int
    output_digest: str


@dataclass(frozen=True)
class SpeedupRow:
    measure: str
    workers: int
    wall_ms: float
    speedup: float


def prediction_digest(predictions: Sequence[Prediction]) -> str:
    """Order-sensitive 64-bit checksum (hex) of the (user, item, predicted bits) sequence."""
    users = np.fromiter((p.user for p in predictions), dtype="<i8", count=len(predictions))
    items = np.fromiter((p.item for p in predictions), dtype="<i8", count=len(predictions))
    vals = np.fromiter((p.predicted for p in predictions), dtype="<f8", count=len(predictions))
    packed = np.empty((len(predictions), 3), dtype="<i8")
    packed[:, 0] = users
    packed[:, 1] = items
    packed[:, 2] = vals.view("<i8")
    return hashlib.blake2b(packed.tobytes(), digest_size=8).hexdigest()


def machine_info() -> dict:
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "processor": platform.processor() or platform.machine(),
        "cpu_count": os.cpu_count(),
        "numpy": np.__version__,
    }


def run_bench(dataset: Dataset, measures: Sequence[SimilarityMeasure], worker_counts: Sequence[int],
              n: int = 20, repeats: int = 3, backend: str | None = None, warmup: bool = True
              ) -> list[BenchRecord]:
    """Time the similarity+prediction phase for every (measure, workers) cell.

    Each cell runs once untimed, then ``repeats`` timed runs; the fastest is
    kept.  Dataset parsing and matrix construction are outside the timed
    region.  Raises DigestMismatchError if any cell's predictions differ from
    the workers=1 cell of the same measure.
    """
    if 1 not in worker_counts:
        raise ValueError("worker_counts must include 1, the sequential baseline")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")

    records = []
    for measure in measures:
        digests = {}
        for workers in worker_counts:
            if warmup:
                predict_all(dataset.train, dataset.test, measure, n, workers, backend)
            best = float("inf")
            preds = None
            for _ in range(repeats):
                t0 = time.perf_counter()
                preds = predict_all(dataset.train, dataset.test, measure, n, workers, backend)
                best = min(best, time.perf_counter() - t0)
            digests[workers] = prediction_digest(preds)
            records.append(BenchRecord(measure.name, int(workers), PHASE_PREDICT,
                                       best * 1000.0, len(dataset.test), digests[workers]))
        if len(set(digests.values())) != 1:
            raise DigestMismatchError(f"{measure.name}: prediction digests differ across worker counts {digests}")
    return records


def speedup_table(records: Sequence[BenchRecord]) -> list[SpeedupRow]:
    baseline = {r.measure: r.wall_ms for r in records if r.workers == 1}
    rows = []
    for r in records:
        if r.measure not in baseline:
            raise ValueError(f"no workers=1 baseline for measure {r.measure!r}")
        rows.append(SpeedupRow(r.measure, r.workers, r.wall_ms, baseline[r.measure] / r.wall_ms))
    return rows
