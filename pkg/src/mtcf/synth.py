"""Planted-cluster synthetic ratings: a desk-scale stand-in for MovieLens.

Every user belongs to one of ``n_clusters`` taste groups.  A group's affinity
for an item is the item's base quality plus a group-specific offset; a rating
is that affinity plus a per-user bias and bounded uniform noise, rounded onto
1..5.  Users also pick items they like more often, so rated-item overlap
carries group signal too.
"""

from __future__ import annotations

import numpy as np

from .ingest import RawRating


def generate_ratings(n_users: int, n_items: int, density: float, seed: int = 0,
                     n_clusters: int = 8, taste_spread: float = 1.5, noise: float = 0.75,
                     user_bias: float = 0.3) -> list[RawRating]:
    """Ratings for users ``1..n_users`` and items ``1..n_items``, deterministic per seed.

    Each user rates about ``density * n_items`` items (binomial count), chosen
    without replacement with weights favoring the user's cluster.  Users whose
    draw comes out as zero items are left out.
    """
    if n_users < 1 or n_items < 1:
        raise ValueError("n_users and n_items must be positive")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    if n_clusters < 1:
        raise ValueError("n_clusters must be positive")

    rng = np.random.default_rng(seed)
    cluster = rng.integers(n_clusters, size=n_users)
    quality = rng.uniform(2.5, 3.5, size=n_items)
    taste = rng.uniform(-taste_spread, taste_spread, size=(n_clusters, n_items))
    affinity = quality + taste
    popularity = np.log(rng.pareto(1.5, size=n_items) + 1.0)
    bias = rng.normal(0.0, user_bias, size=n_users)
    counts = rng.binomial(n_items, density, size=n_users)

    out: list[RawRating] = []
    for u in range(n_users):
        k = int(counts[u])
        if k == 0:
            continue
        c = cluster[u]
        # Gumbel top-k: weighted sampling without replacement.
        keys = popularity + 0.5 * taste[c] + rng.gumbel(size=n_items)
        items = np.sort(np.argpartition(-keys, k - 1)[:k]) if k < n_items else np.arange(n_items)
        raw = affinity[c, items] + bias[u] + rng.uniform(-noise, noise, size=k)
        ratings = np.clip(np.rint(raw), 1, 5)
        out.extend(RawRating(u + 1, int(i) + 1, float(r), 0) for i, r in zip(items, ratings))
    return out
