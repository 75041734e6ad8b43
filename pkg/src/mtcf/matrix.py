"""Immutable sparse user x item ratings store.

Ratings are held twice in compressed form: by user (items ascending) and by
item (users ascending).  Users and items are addressed by their original ids in
the public API; internally rows are numbered by position in the sorted id
arrays, so position order and id order agree.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np


class UnknownUserError(KeyError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class RatingsMatrix:
    """Sparse ratings with per-user and per-item indexes and per-user means.

    ``user_dev`` and ``item_dev`` hold each rating minus its user's mean; they
    are computed once at construction so every consumer sees the same doubles.
    """

    def __init__(self, users, items, ratings):
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        ratings = np.asarray(ratings, dtype=np.float64)
        if len(ratings) and (ratings.min() < 1.0 or ratings.max() > 5.0):
            raise ValueError("ratings must lie in [1, 5]")

        self.user_ids, upos = np.unique(users, return_inverse=True)
        self.item_ids, ipos = np.unique(items, return_inverse=True)
        n_users, n_items = len(self.user_ids), len(self.item_ids)

        by_user = np.lexsort((ipos, upos))
        self.user_ptr = np.zeros(n_users + 1, dtype=np.int64)
        np.cumsum(np.bincount(upos, minlength=n_users), out=self.user_ptr[1:])
        self.user_item_pos = ipos[by_user]
        self.user_items = self.item_ids[self.user_item_pos]
        self.user_vals = ratings[by_user]

        counts = np.diff(self.user_ptr)
        sums = np.bincount(upos[by_user], weights=self.user_vals, minlength=n_users)
        self.means = sums / np.maximum(counts, 1)
        row_of = np.repeat(np.arange(n_users), counts)
        self.user_dev = self.user_vals - self.means[row_of]

        by_item = np.lexsort((upos, ipos))
        self.item_ptr = np.zeros(n_items + 1, dtype=np.int64)
        np.cumsum(np.bincount(ipos, minlength=n_items), out=self.item_ptr[1:])
        self.item_user_pos = upos[by_item]
        self.item_vals = ratings[by_item]
        self.item_dev = self.item_vals - self.means[self.item_user_pos]

        self.global_mean = float(ratings.mean()) if len(ratings) else float("nan")
        self._pos = {int(u): k for k, u in enumerate(self.user_ids)}

        for name in ("user_ids", "item_ids", "user_ptr", "user_item_pos", "user_items",
                     "user_vals", "means", "user_dev", "item_ptr", "item_user_pos",
                     "item_vals", "item_dev"):
            _readonly(getattr(self, name))

    def __getstate__(self):
        return {"args": (self.user_ids[np.repeat(np.arange(self.n_users), np.diff(self.user_ptr))],
                         self.user_items, self.user_vals)}

    def __setstate__(self, state):
        self.__init__(*state["args"])

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    @property
    def n_ratings(self) -> int:
        return len(self.user_vals)

    def has_user(self, user_id) -> bool:
        return int(user_id) in self._pos

    def position(self, user_id) -> int:
        try:
            return self._pos[int(user_id)]
        except KeyError:
            raise UnknownUserError(user_id) from None

    def _slice(self, user_id) -> slice:
        p = self.position(user_id)
        return slice(self.user_ptr[p], self.user_ptr[p + 1])

    def items_of(self, user_id) -> np.ndarray:
        return self.user_items[self._slice(user_id)]

    def ratings_of(self, user_id) -> list[tuple[int, float]]:
        s = self._slice(user_id)
        return list(zip(self.user_items[s].tolist(), self.user_vals[s].tolist()))

    def mean(self, user_id) -> float:
        return float(self.means[self.position(user_id)])

    def rating(self, user_id, item_id) -> float | None:
        s = self._slice(user_id)
        items = self.user_items[s]
        k = np.searchsorted(items, item_id)
        if k < len(items) and items[k] == item_id:
            return float(self.user_vals[s][k])
        return None

    @property
    def user_index(self) -> dict[int, list[tuple[int, float]]]:
        return {int(u): self.ratings_of(u) for u in self.user_ids}

    @property
    def item_index(self) -> dict[int, list[tuple[int, float]]]:
        out = {}
        for k, i in enumerate(self.item_ids):
            s = slice(self.item_ptr[k], self.item_ptr[k + 1])
            out[int(i)] = list(zip(self.user_ids[self.item_user_pos[s]].tolist(),
                                   self.item_vals[s].tolist()))
        return out

    @property
    def user_means(self) -> dict[int, float]:
        return dict(zip(self.user_ids.tolist(), self.means.tolist()))

    def co_rated(self, a, b) -> list[tuple[int, float, float]]:
        """Items rated by both users as ``(item_id, rating_a, rating_b)``, ascending item id."""
        sa, sb = self._slice(a), self._slice(b)
        ia, ra = self.user_items[sa].tolist(), self.user_vals[sa].tolist()
        ib, rb = self.user_items[sb].tolist(), self.user_vals[sb].tolist()
        out = []
        x = y = 0
        while x < len(ia) and y < len(ib):
            if ia[x] == ib[y]:
                out.append((ia[x], ra[x], rb[y]))
                x += 1
                y += 1
            elif ia[x] < ib[y]:
                x += 1
            else:
                y += 1
        return out

    def user_item_sets(self, a, b) -> tuple[int, int]:
        """``(|items(a) & items(b)|, |items(a) | items(b)|)``, rating values ignored."""
        na = len(self.items_of(a))
        nb = len(self.items_of(b))
        inter = len(self.co_rated(a, b))
        return inter, na + nb - inter

    def triples(self) -> list[tuple[int, int, float]]:
        rows = np.repeat(self.user_ids, np.diff(self.user_ptr))
        return list(zip(rows.tolist(), self.user_items.tolist(), self.user_vals.tolist()))

    def __repr__(self):
        return f"RatingsMatrix(n_users={self.n_users}, n_items={self.n_items}, n_ratings={self.n_ratings})"


def build_matrix(train: Iterable) -> RatingsMatrix:
    """Build a matrix from ``(user_id, item_id, rating, ...)`` records; a repeated pair keeps the last rating."""
    latest: dict[tuple[int, int], float] = {}
    for rec in train:
        latest[(int(rec[0]), int(rec[1]))] = float(rec[2])
    if not latest:
        return RatingsMatrix([], [], [])
    keys = np.array(list(latest.keys()), dtype=np.int64)
    return RatingsMatrix(keys[:, 0], keys[:, 1], np.fromiter(latest.values(), dtype=np.float64))
