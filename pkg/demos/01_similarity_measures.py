"""
Three ways to say two users are alike
=====================================

A four-user toy matrix scored with Jaccard (overlap of rated items),
normalized Pearson (agreement of mean-centered ratings) and Cosine (angle
between co-rated rating vectors).  All three land in [0, 1].
"""

from mtcf import COSINE, JACCARD, PEARSON, build_matrix, similarity_row
from mtcf.similarity import score

ratings = [
    (1, 10, 5), (1, 11, 4), (1, 12, 1), (1, 13, 2),
    (2, 10, 4), (2, 11, 5), (2, 12, 2),
    (3, 10, 1), (3, 11, 2), (3, 12, 5), (3, 13, 4),
    (4, 13, 3), (4, 14, 3),
]
m = build_matrix(ratings)
print(m)

# %%
# Whole rows for user 1.  Candidates with no defined score are left out:
# user 4 shares a single item with user 1, too few for a correlation.
for measure in (JACCARD, PEARSON, COSINE):
    row = similarity_row(m, 1, measure)
    print(f"{measure.name:8s}", [(u, round(s, 3)) for u, s in row.pairs()])

# %%
# Users 1 and 3 rated the same four items in opposite directions.  Jaccard
# only sees the overlap, Pearson sees the disagreement, Cosine sits between
# because raw ratings are all positive.
for measure in (JACCARD, PEARSON, COSINE):
    print(f"{measure.name:8s} sim(1, 3) = {score(m, 1, 3, measure):.3f}")

# %%
# Scores are symmetric to the last bit.
assert all(score(m, a, b, PEARSON) == score(m, b, a, PEARSON) for a, b in [(1, 2), (1, 3), (2, 3)])
