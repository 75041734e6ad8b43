import numpy as np
import pytest

from mtcf.ingest import RawRating
from mtcf.matrix import build_matrix


def matrix_from(rows: dict):
    """``{user: {item: rating}}`` -> RatingsMatrix."""
    return build_matrix([(u, i, r) for u, items in rows.items() for i, r in items.items()])


def random_rows(seed, n_users=20, n_items=15, density=0.4):
    rng = np.random.default_rng(seed)
    rows = {}
    for u in range(1, n_users + 1):
        mask = rng.random(n_items) < density
        if not mask.any():
            mask[rng.integers(n_items)] = True
        rows[u] = {int(i) + 1: float(rng.integers(1, 6)) for i in np.flatnonzero(mask)}
    return rows


def ratings_from(rows: dict):
    return [RawRating(u, i, r, 0) for u, items in rows.items() for i, r in items.items()]


@pytest.fixture
def small_rows():
    return {
        1: {1: 4.0, 2: 3.0, 5: 5.0},
        2: {2: 5.0, 3: 1.0, 5: 4.0},
        3: {1: 2.0, 2: 2.0, 3: 4.0, 4: 5.0},
    }


@pytest.fixture
def small_matrix(small_rows):
    return matrix_from(small_rows)


# -- acceptance summary: one line per criterion ----------------------------------

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _criteria[name] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_criteria.items()):
        terminalreporter.write_line(f"{outcome:4}  {name}")
