"""Rating-prediction metrics (MAE, thresholded precision/recall/F1) and the top-N and sparsity sweeps."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ingest import Dataset, RawRating, SplitSpec, split, train_mask
from .matrix import RatingsMatrix, build_matrix
from .predict import Fallback, Prediction, predict_sweep
from .similarity import SimilarityMeasure


@dataclass(frozen=True)
class RelevanceThreshold:
    cutoff: float = 4.0

    def __post_init__(self):
        if not 1.0 < self.cutoff <= 5.0:
            raise ValueError(f"cutoff must lie in (1, 5], got {self.cutoff}")


@dataclass(frozen=True)
class EvalReport:
    mae: float
    precision: float | None
    recall: float | None
    f1: float | None
    tp: int
    fp: int
    fn: int
    tn: int
    n_predictions: int
    fallback_counts: dict[str, int] = field(default_factory=dict)


def mae(predictions: Sequence[Prediction]) -> float:
    if not predictions:
        raise ValueError("MAE of an empty prediction list is undefined")
    total = 0.0
    for p in predictions:
        total += abs(p.predicted - p.actual)
    return total / len(predictions)


def confusion(predictions: Sequence[Prediction], t: RelevanceThreshold = RelevanceThreshold()
              ) -> tuple[int, int, int, int]:
    """``(tp, fp, fn, tn)`` where a rating at or above the cutoff counts as good."""
    tp = fp = fn = tn = 0
    for p in predictions:
        said_good = p.predicted >= t.cutoff
        is_good = p.actual >= t.cutoff
        if said_good and is_good:
            tp += 1
        elif said_good:
            fp += 1
        elif is_good:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def precision_recall_f1(tp: int, fp: int, fn: int) -> tuple[float | None, float | None, float | None]:
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    if precision is None or recall is None or precision + recall == 0.0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def evaluate(predictions: Sequence[Prediction], t: RelevanceThreshold = RelevanceThreshold()) -> EvalReport:
    tp, fp, fn, tn = confusion(predictions, t)
    precision, recall, f1 = precision_recall_f1(tp, fp, fn)
    counts = Counter(p.fallback for p in predictions)
    return EvalReport(
        mae=mae(predictions),
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp, fp=fp, fn=fn, tn=tn,
        n_predictions=len(predictions),
        fallback_counts={f.label: counts.get(f, 0) for f in Fallback},
    )


def global_mean_mae(matrix: RatingsMatrix, test: Sequence) -> float:
    """MAE of predicting the training mean for every test record."""
    g = matrix.global_mean
    return mae([Prediction(r[0], r[1], g, r[2], Fallback.GLOBAL_MEAN) for r in test])


def sweep_top_n(dataset: Dataset, measure: SimilarityMeasure, n_values: Sequence[int],
                t: RelevanceThreshold = RelevanceThreshold(), workers: int = 1,
                backend: str | None = None) -> list[tuple[int, EvalReport]]:
    n_values = list(n_values)
    if not n_values:
        raise ValueError("n_values must be non-empty")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be strictly ascending")
    preds = predict_sweep(dataset.train, dataset.test, measure, n_values, workers, backend)
    return [(n, evaluate(preds[n], t)) for n in n_values]


def subsample(ratings: Sequence[RawRating], fraction: float, seed) -> list[RawRating]:
    """Keep each rating when its draw from ``default_rng(seed)`` is below ``fraction``.

    The draws do not depend on ``fraction``, so for a fixed seed a smaller
    fraction always keeps a subset of what a larger one keeps.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"keep fraction must lie in (0, 1], got {fraction}")
    if fraction == 1.0:
        return list(ratings)
    keep = np.random.default_rng(seed).random(len(ratings)) < fraction
    return [r for r, k in zip(ratings, keep) if k]


def sweep_sparsity(ratings: Sequence[RawRating], keep_fractions: Sequence[float], n: int,
                   measure: SimilarityMeasure, t: RelevanceThreshold = RelevanceThreshold(),
                   seed: int = 42, workers: int = 1, split_spec: SplitSpec | None = None,
                   backend: str | None = None) -> list[tuple[float, EvalReport]]:
    """Thin the training data and re-evaluate against one fixed test set.

    The ratings are split once with ``split_spec`` (train fraction 0.9 and
    ``seed`` by default); each keep fraction subsamples the training side,
    rebuilds the matrix and predicts the same test records.  Subsampling draws
    from a stream seeded with ``[seed, 1]`` so it is independent of the split.  Test users left
    without training ratings fall back to the global mean.
    """
    keep_fractions = list(keep_fractions)
    if any(b <= a for a, b in zip(keep_fractions, keep_fractions[1:])):
        raise ValueError("keep fractions must be strictly ascending")
    spec = split_spec or SplitSpec(0.9, seed)
    base = split(ratings, spec)
    mask = train_mask(len(ratings), spec)
    train = [r for r, m in zip(ratings, mask) if m]

    out = []
    for frac in keep_fractions:
        matrix = base.train if frac == 1.0 else build_matrix(subsample(train, frac, [seed, 1]))
        preds = predict_sweep(matrix, base.test, measure, [n], workers, backend)[n]
        out.append((frac, evaluate(preds, t)))
    return out
