"""Reading MovieLens-style ratings files and producing a seeded train/test split."""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .matrix import RatingsMatrix, build_matrix

logger = logging.getLogger(__name__)

RATING_MIN = 1.0
RATING_MAX = 5.0

CSV_HEADER = ("userId", "movieId", "rating", "timestamp")


class RatingsFormatError(ValueError):
    """A ratings file line could not be parsed or failed validation."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{self.path}:{lineno}: {message}")


class RawRating(NamedTuple):
    user_id: int
    item_id: int
    rating: float
    timestamp: int = 0


class ParsedRatings(NamedTuple):
    ratings: list[RawRating]
    duplicates: int


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class Dataset:
    train: RatingsMatrix
    test: list[RawRating]
    n_train: int
    n_dropped: int

    @property
    def n_users(self) -> int:
        return self.train.n_users

    @property
    def n_items(self) -> int:
        return self.train.n_items


def _detect_format(path) -> str:
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".csv":
        return "csv"
    return "dat"


def _validated(path, lineno, fields: Sequence[str]) -> RawRating:
    if len(fields) != 4:
        raise RatingsFormatError(path, lineno, f"expected 4 fields, got {len(fields)}")
    try:
        user = int(fields[0])
        item = int(fields[1])
        rating = float(fields[2])
        timestamp = int(fields[3]) if fields[3].strip() else 0
    except ValueError as exc:
        raise RatingsFormatError(path, lineno, str(exc)) from None
    if user <= 0 or item <= 0:
        raise RatingsFormatError(path, lineno, "user and item ids must be positive")
    if not RATING_MIN <= rating <= RATING_MAX:
        raise RatingsFormatError(path, lineno, f"rating {rating} outside [1, 5]")
    if timestamp < 0:
        raise RatingsFormatError(path, lineno, "timestamp must be non-negative")
    return RawRating(user, item, rating, timestamp)


def _dat_lines(path, fh) -> Iterable[tuple[int, list[str]]]:
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        yield lineno, line.split("::")


def _csv_lines(path, fh) -> Iterable[tuple[int, list[str]]]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise RatingsFormatError(path, 1, f"expected header {','.join(CSV_HEADER)}")
    for row in reader:
        if not row:
            continue
        yield reader.line_num, row


def parse_movielens(path, format: str | None = None) -> ParsedRatings:
    """Parse a ratings file in MovieLens ``.dat`` (``UserID::MovieID::Rating::Timestamp``)
    or headered CSV form.

    Records come back in file order.  A repeated (user, item) pair keeps its last
    rating, stays at the position of its first occurrence, and is counted in
    ``duplicates``.
    """
    fmt = format or _detect_format(path)
    if fmt not in ("dat", "csv"):
        raise ValueError(f"unknown ratings format {fmt!r}")
    lines = _dat_lines if fmt == "dat" else _csv_lines

    records: list[RawRating] = []
    seen: dict[tuple[int, int], int] = {}
    duplicates = 0
    with open(path, encoding="latin-1", newline="") as fh:
        for lineno, fields in lines(path, fh):
            rec = _validated(path, lineno, fields)
            key = (rec.user_id, rec.item_id)
            pos = seen.get(key)
            if pos is None:
                seen[key] = len(records)
                records.append(rec)
            else:
                records[pos] = rec
                duplicates += 1
    if duplicates:
        logger.warning("%s: %d duplicate (user, item) pairs, kept last occurrence", path, duplicates)
    logger.info("%s: %d ratings from %d users", path, len(records), len(set(u for u, _ in seen)))
    return ParsedRatings(records, duplicates)


def write_ratings(path, ratings: Iterable[RawRating], format: str | None = None) -> None:
    fmt = format or _detect_format(path)
    with open(path, "w", encoding="ascii", newline="") as fh:
        if fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in ratings:
                writer.writerow((r.user_id, r.item_id, _fmt_rating(r.rating), r.timestamp))
        elif fmt == "dat":
            for r in ratings:
                fh.write(f"{r.user_id}::{r.item_id}::{_fmt_rating(r.rating)}::{r.timestamp}\n")
        else:
            raise ValueError(f"unknown ratings format {fmt!r}")


def _fmt_rating(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def train_mask(n: int, spec: SplitSpec) -> np.ndarray:
    """Boolean train/test assignment for ``n`` ratings.

    One uniform draw per rating from ``numpy.random.default_rng(seed)`` (PCG64);
    rating k goes to train when its draw is below ``train_fraction``.
    """
    rng = np.random.default_rng(spec.seed)
    return rng.random(n) < spec.train_fraction


def split(ratings: Sequence[RawRating], spec: SplitSpec = SplitSpec()) -> Dataset:
    if not ratings:
        raise ValueError("cannot split an empty ratings list")
    mask = train_mask(len(ratings), spec)
    train = [r for r, m in zip(ratings, mask) if m]
    test = [r for r, m in zip(ratings, mask) if not m]
    if not train or not test:
        side = "train" if not train else "test"
        raise ValueError(f"split left the {side} side empty ({len(ratings)} ratings, seed {spec.seed})")

    matrix = build_matrix(train)
    kept = [r for r in test if matrix.has_user(r.user_id)]
    dropped = len(test) - len(kept)
    if dropped:
        logger.info("dropped %d test ratings whose user has no training ratings", dropped)
    return Dataset(train=matrix, test=kept, n_train=len(train), n_dropped=dropped)
