"""Top-N neighbor selection and neighborhood rating prediction, run per user over a worker pool.

The unit of work is one target user: score it against everyone, keep its
top-N neighbors, predict each of its test items.  Users are independent, so
they are spread over workers and the results are written back by record
index; the output never depends on how many workers ran.
"""

from __future__ import annotations

import enum
import multiprocessing
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix import RatingsMatrix
from .similarity import SimilarityMeasure, SimilarityRow, similarity_scores

RATING_MIN = 1.0
RATING_MAX = 5.0


class Fallback(enum.IntEnum):
    NEIGHBORS = 0
    USER_MEAN = 1
    GLOBAL_MEAN = 2

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class NeighborList:
    target: int
    neighbors: tuple[tuple[int, float], ...]

    def __len__(self):
        return len(self.neighbors)


@dataclass(frozen=True, slots=True)
class Prediction:
    user: int
    item: int
    predicted: float
    actual: float
    fallback: Fallback = Fallback.NEIGHBORS


def _top_order(candidates: np.ndarray, scores: np.ndarray, n: int) -> np.ndarray:
    """Indices of the ``n`` best entries: score descending, then candidate id ascending."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(scores) > 4 * n:
        cut = np.partition(scores, len(scores) - n)[len(scores) - n]
        keep = np.flatnonzero(scores >= cut)
    else:
        keep = np.arange(len(scores))
    order = np.lexsort((candidates[keep], -scores[keep]))
    return keep[order[:n]]


def top_n(row: SimilarityRow, n: int) -> NeighborList:
    sel = _top_order(row.candidates, row.scores, n)
    return NeighborList(row.target, tuple(zip(row.candidates[sel].tolist(), row.scores[sel].tolist())))


def _combine(mean_u: float, num: float, den: float) -> float:
    return min(RATING_MAX, max(RATING_MIN, mean_u + num / den))


def predict_rating(matrix: RatingsMatrix, neighbors: NeighborList, item) -> tuple[float, Fallback]:
    """Mean-centered weighted average over the neighbors that rated ``item``.

    Neighbors with score 0 are skipped.  With no usable neighbor the user's
    mean is returned, and the global training mean for a user the matrix has
    never seen.
    """
    if not matrix.has_user(neighbors.target):
        return matrix.global_mean, Fallback.GLOBAL_MEAN
    num = den = 0.0
    for v, s in neighbors.neighbors:
        if s <= 0.0:
            continue
        row = matrix.items_of(v)
        k = int(np.searchsorted(row, item))
        if k == len(row) or row[k] != item:
            continue
        num += s * float(matrix.user_dev[matrix.user_ptr[matrix.position(v)] + k])
        den += s
    mean_u = matrix.mean(neighbors.target)
    if den > 0.0:
        return _combine(mean_u, num, den), Fallback.NEIGHBORS
    return mean_u, Fallback.USER_MEAN


def _predict_user(matrix: RatingsMatrix, p: int, items: np.ndarray, measure: SimilarityMeasure,
                  n_values: Sequence[int]):
    """Predictions of user position ``p`` for ``items``, one array pair per entry of ``n_values``.

    Neighbor contributions are accumulated in rank order, the same order
    ``predict_rating`` uses, so both give identical doubles.
    """
    cand, scores = similarity_scores(matrix, p, measure)
    order = _top_order(cand, scores, max(n_values))
    nb_pos, nb_score = cand[order], scores[order]

    num = np.zeros(len(items))
    den = np.zeros(len(items))
    snapshots = {}
    marks = {min(n, len(nb_pos)) for n in n_values}
    for rank in range(len(nb_pos) + 1):
        if rank in marks:
            snapshots[rank] = (num.copy(), den.copy())
        if rank == len(nb_pos):
            break
        s = float(nb_score[rank])
        if s <= 0.0:
            continue
        v = nb_pos[rank]
        lo, hi = matrix.user_ptr[v], matrix.user_ptr[v + 1]
        row = matrix.user_items[lo:hi]
        k = np.searchsorted(row, items)
        k_safe = np.minimum(k, len(row) - 1)
        hit = (k < len(row)) & (row[k_safe] == items)
        if not hit.any():
            continue
        dev = matrix.user_dev[lo + k_safe[hit]]
        num[hit] += s * dev
        den[hit] += s

    mean_u = float(matrix.means[p])
    out = []
    for n in n_values:
        num_n, den_n = snapshots[min(n, len(nb_pos))]
        pred = np.full(len(items), mean_u)
        fb = np.full(len(items), int(Fallback.USER_MEAN), dtype=np.int8)
        used = den_n > 0.0
        pred[used] = np.clip(mean_u + num_n[used] / den_n[used], RATING_MIN, RATING_MAX)
        fb[used] = int(Fallback.NEIGHBORS)
        out.append((pred, fb))
    return out


# -- worker pool ---------------------------------------------------------------

_shared: dict = {}


def _init_worker(matrix, measure, n_values):
    _shared["job"] = (matrix, measure, tuple(n_values))


def _run_chunk(chunk, job=None):
    matrix, measure, n_values = job if job is not None else _shared["job"]
    results = []
    for p, items in chunk:
        results.append(_predict_user(matrix, p, items, measure, n_values))
    return results


def _chunks(tasks: list, n_chunks: int) -> list[list]:
    size = max(1, -(-len(tasks) // n_chunks))
    return [tasks[k:k + size] for k in range(0, len(tasks), size)]


def _make_pool(workers: int, backend: str, initargs) -> Executor:
    if backend == "process":
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                                   initializer=_init_worker, initargs=initargs)
    if backend == "thread":
        return ThreadPoolExecutor(max_workers=workers)
    raise ValueError(f"unknown backend {backend!r}")


def default_backend() -> str:
    return "process" if hasattr(os, "fork") else "thread"


def predict_sweep(matrix: RatingsMatrix, test: Sequence, measure: SimilarityMeasure,
                  n_values: Sequence[int], workers: int = 1, backend: str | None = None
                  ) -> dict[int, list[Prediction]]:
    """Predict every test record for several neighborhood sizes in one pass.

    Each user's similarity row and neighbor ranking is computed once; the
    neighborhood of size n is the first n entries of that ranking.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    n_values = [int(n) for n in n_values]
    if not n_values or min(n_values) < 1:
        raise ValueError("n_values must be non-empty and each at least 1")
    backend = backend or default_backend()

    users = np.fromiter((r[0] for r in test), dtype=np.int64, count=len(test))
    items = np.fromiter((r[1] for r in test), dtype=np.int64, count=len(test))
    actual = np.fromiter((r[2] for r in test), dtype=np.float64, count=len(test))

    pred = {n: np.full(len(test), matrix.global_mean) for n in n_values}
    fb = {n: np.full(len(test), int(Fallback.GLOBAL_MEAN), dtype=np.int8) for n in n_values}

    groups: dict[int, list[int]] = {}
    for k, u in enumerate(users.tolist()):
        groups.setdefault(u, []).append(k)
    tasks, slots = [], []
    for u, rows in groups.items():
        if not matrix.has_user(u):
            continue
        rows = np.array(rows, dtype=np.int64)
        tasks.append((matrix.position(u), items[rows]))
        slots.append(rows)

    if tasks:
        job = (matrix, measure, tuple(n_values))
        if workers == 1:
            results = _run_chunk(tasks, job)
        else:
            chunks = _chunks(tasks, workers * 4)
            with _make_pool(workers, backend, job) as pool:
                if backend == "thread":
                    parts = pool.map(_run_chunk, chunks, [job] * len(chunks))
                else:
                    parts = pool.map(_run_chunk, chunks)
                results = [r for part in parts for r in part]
        for rows, per_n in zip(slots, results):
            for n, (pv, fv) in zip(n_values, per_n):
                pred[n][rows] = pv
                fb[n][rows] = fv

    out = {}
    for n in n_values:
        out[n] = [Prediction(u, i, p, a, Fallback(f)) for u, i, p, a, f in
                  zip(users.tolist(), items.tolist(), pred[n].tolist(), actual.tolist(), fb[n].tolist())]
    return out


def predict_all(matrix: RatingsMatrix, test: Sequence, measure: SimilarityMeasure, n: int,
                workers: int = 1, backend: str | None = None) -> list[Prediction]:
    """One prediction per test record, in input order, identical for any ``workers``."""
    return predict_sweep(matrix, test, measure, [n], workers, backend)[n]
