"""
Sequential versus parallel
==========================

Time the similarity + prediction phase at several worker counts.  Every
cell's predictions are checksummed; the harness refuses to report timings if
any worker count changes a single bit of the output.
"""

import os

from mtcf import COSINE, JACCARD, PEARSON, SplitSpec, generate_ratings, run_bench, speedup_table, split

ds = split(generate_ratings(3000, 1500, 0.02, seed=1), SplitSpec(0.9, 42))
workers = sorted({1, 2, 4, os.cpu_count() or 1})
print(f"{ds.n_users} users, {len(ds.test)} test ratings, {os.cpu_count()} CPUs, workers {workers}")

# %%
records = run_bench(ds, [JACCARD, PEARSON, COSINE], workers, n=20, repeats=2)
for rec, row in zip(records, speedup_table(records)):
    print(f"{rec.measure:8s} workers={rec.workers:2d}  {rec.wall_ms:8.1f} ms  x{row.speedup:.2f}  {rec.output_digest}")

# %%
# The default pool forks processes; the matrix is inherited read-only, so
# nothing large is pickled.  backend="thread" is available too, but the
# per-user kernels hold the GIL for most of their run.
