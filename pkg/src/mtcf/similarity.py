"""User-user similarity under Jaccard, normalized Pearson and Cosine.

All scores live in [0, 1], higher meaning more alike.  Two routes compute them:

* the pairwise functions (``jaccard``, ``pearson_normalized``, ``cosine``) walk
  the merged co-rated list of one pair;
* ``similarity_scores`` scores one target against every other user at once by
  scattering the target's item columns and accumulating with ``np.bincount``.

Both routes add the per-item terms in ascending item order starting from 0.0,
so they agree bit for bit, and score(a, b) == score(b, a) exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .matrix import RatingsMatrix


class Kind(str, enum.Enum):
    JACCARD = "jaccard"
    PEARSON = "pcc"
    COSINE = "cosine"


_ALIASES = {
    "jaccard": Kind.JACCARD,
    "pcc": Kind.PEARSON,
    "pearson": Kind.PEARSON,
    "cosine": Kind.COSINE,
    "cos": Kind.COSINE,
}


@dataclass(frozen=True)
class SimilarityMeasure:
    kind: Kind
    min_overlap: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.min_overlap < 1:
            raise ValueError("min_overlap must be at least 1")

    @classmethod
    def parse(cls, name: str, min_overlap: int | None = None) -> "SimilarityMeasure":
        try:
            kind = _ALIASES[name.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown similarity measure {name!r}") from None
        if min_overlap is None:
            min_overlap = 2 if kind is Kind.PEARSON else 1
        return cls(kind, min_overlap)

    @property
    def effective_min_overlap(self) -> int:
        if self.kind is Kind.PEARSON:
            return max(self.min_overlap, 2)
        return self.min_overlap

    @property
    def name(self) -> str:
        return self.kind.value


JACCARD = SimilarityMeasure(Kind.JACCARD, 1)
PEARSON = SimilarityMeasure(Kind.PEARSON, 2)
COSINE = SimilarityMeasure(Kind.COSINE, 1)


@dataclass(frozen=True)
class SimilarityRow:
    """Scores of one target user against its candidates (target excluded)."""

    target: int
    candidates: np.ndarray
    scores: np.ndarray = field(repr=False)

    @classmethod
    def from_pairs(cls, target: int, pairs: Iterable[tuple[int, float]]) -> "SimilarityRow":
        pairs = list(pairs)
        cand = np.array([p[0] for p in pairs], dtype=np.int64)
        sc = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(int(target), cand, sc)

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.candidates.tolist(), self.scores.tolist()))

    def __len__(self):
        return len(self.candidates)


# -- pairwise -----------------------------------------------------------------

def _pearson_from_sums(num: float, sa: float, sb: float) -> float | None:
    if sa == 0.0 or sb == 0.0:
        return None
    raw = num / math.sqrt(sa * sb)
    raw = min(1.0, max(-1.0, raw))
    return (raw + 1.0) / 2.0


def _cosine_from_sums(dot: float, na: float, nb: float) -> float | None:
    if na == 0.0 or nb == 0.0:
        return None
    return min(1.0, max(0.0, dot / math.sqrt(na * nb)))


def jaccard(matrix: RatingsMatrix, a, b) -> float:
    inter, union = matrix.user_item_sets(a, b)
    if union == 0:
        return 0.0
    return inter / union


def _co_rated_devs(matrix: RatingsMatrix, a, b):
    """Co-rated (dev_a, dev_b) pairs, deviations taken from the stored full-history means."""
    pa, pb = matrix.position(a), matrix.position(b)
    sa = slice(matrix.user_ptr[pa], matrix.user_ptr[pa + 1])
    sb = slice(matrix.user_ptr[pb], matrix.user_ptr[pb + 1])
    ia, da = matrix.user_items[sa].tolist(), matrix.user_dev[sa].tolist()
    ib, db = matrix.user_items[sb].tolist(), matrix.user_dev[sb].tolist()
    out = []
    x = y = 0
    while x < len(ia) and y < len(ib):
        if ia[x] == ib[y]:
            out.append((da[x], db[y]))
            x += 1
            y += 1
        elif ia[x] < ib[y]:
            x += 1
        else:
            y += 1
    return out


def pearson_normalized(matrix: RatingsMatrix, a, b, min_overlap: int = 2) -> float | None:
    """Pearson correlation over co-rated items mapped to [0, 1] by ``(r + 1) / 2``.

    Means are each user's mean over all their training ratings.  Returns None
    for fewer than ``max(min_overlap, 2)`` co-rated items or a zero-norm
    deviation vector.
    """
    devs = _co_rated_devs(matrix, a, b)
    if len(devs) < max(min_overlap, 2):
        return None
    num = sa = sb = 0.0
    for da, db in devs:
        num += da * db
        sa += da * da
        sb += db * db
    return _pearson_from_sums(num, sa, sb)


def cosine(matrix: RatingsMatrix, a, b, min_overlap: int = 1) -> float | None:
    co = matrix.co_rated(a, b)
    if len(co) < max(min_overlap, 1):
        return None
    dot = na = nb = 0.0
    for _, ra, rb in co:
        dot += ra * rb
        na += ra * ra
        nb += rb * rb
    return _cosine_from_sums(dot, na, nb)


def score(matrix: RatingsMatrix, a, b, measure: SimilarityMeasure) -> float | None:
    """Pairwise score with the measure's overlap policy applied; None when undefined."""
    if measure.kind is Kind.JACCARD:
        inter, union = matrix.user_item_sets(a, b)
        if inter < measure.effective_min_overlap:
            return None
        return inter / union
    if measure.kind is Kind.PEARSON:
        return pearson_normalized(matrix, a, b, measure.min_overlap)
    return cosine(matrix, a, b, measure.min_overlap)


# -- one target against everyone -------------------------------------------------

def _gather(matrix: RatingsMatrix, p: int):
    """Entries of every item column the target rated, concatenated in ascending item order.

    Returns (target row offsets per entry, candidate positions, entry offsets).
    """
    lo, hi = matrix.user_ptr[p], matrix.user_ptr[p + 1]
    cols = matrix.user_item_pos[lo:hi]
    starts = matrix.item_ptr[cols]
    lens = matrix.item_ptr[cols + 1] - starts
    total = int(lens.sum())
    owner = np.repeat(np.arange(lo, hi), lens)
    offs = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens) + np.repeat(starts, lens)
    return owner, matrix.item_user_pos[offs], offs


def similarity_scores(matrix: RatingsMatrix, p: int, measure: SimilarityMeasure):
    """Score user at position ``p`` against all other users.

    Returns ``(candidate_positions, scores)`` with positions ascending and
    undefined candidates omitted.
    """
    n = matrix.n_users
    owner, cand, offs = _gather(matrix, p)
    count = np.bincount(cand, minlength=n)
    kind = measure.kind

    if kind is Kind.JACCARD:
        sizes = np.diff(matrix.user_ptr)
        union = sizes[p] + sizes - count
        ok = count >= measure.effective_min_overlap
        ok[p] = False
        idx = np.flatnonzero(ok)
        return idx, count[idx] / union[idx]

    if kind is Kind.PEARSON:
        xt, xc = matrix.user_dev[owner], matrix.item_dev[offs]
    else:
        xt, xc = matrix.user_vals[owner], matrix.item_vals[offs]
    cross = np.bincount(cand, weights=xt * xc, minlength=n)
    st = np.bincount(cand, weights=xt * xt, minlength=n)
    sc = np.bincount(cand, weights=xc * xc, minlength=n)

    ok = (count >= measure.effective_min_overlap) & (st != 0.0) & (sc != 0.0)
    ok[p] = False
    idx = np.flatnonzero(ok)
    val = cross[idx] / np.sqrt(st[idx] * sc[idx])
    if kind is Kind.PEARSON:
        return idx, (np.clip(val, -1.0, 1.0) + 1.0) / 2.0
    return idx, np.clip(val, 0.0, 1.0)


def similarity_row(matrix: RatingsMatrix, target, measure: SimilarityMeasure) -> SimilarityRow:
    p = matrix.position(target)
    idx, sc = similarity_scores(matrix, p, measure)
    return SimilarityRow(int(target), matrix.user_ids[idx], sc)
