"""Parallel user-based collaborative filtering.

Similarity (Jaccard, normalized Pearson, Cosine), top-N neighborhood rating
prediction over a worker pool whose output is identical for any worker count,
MAE / precision / recall / F1 evaluation, and a sequential-vs-parallel timing
harness.
"""

__version__ = "0.1.0"

from .bench import BenchRecord, DigestMismatchError, prediction_digest, run_bench, speedup_table
from .evaluation import (
    EvalReport,
    RelevanceThreshold,
    confusion,
    evaluate,
    global_mean_mae,
    mae,
    precision_recall_f1,
    sweep_sparsity,
    sweep_top_n,
)
from .ingest import Dataset, RawRating, RatingsFormatError, SplitSpec, parse_movielens, split, write_ratings
from .matrix import RatingsMatrix, UnknownUserError, build_matrix
from .predict import Fallback, NeighborList, Prediction, predict_all, predict_rating, predict_sweep, top_n
from .similarity import (
    COSINE,
    JACCARD,
    PEARSON,
    Kind,
    SimilarityMeasure,
    SimilarityRow,
    cosine,
    jaccard,
    pearson_normalized,
    similarity_row,
)
from .synth import generate_ratings
