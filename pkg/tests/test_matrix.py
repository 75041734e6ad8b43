import pytest
from hypothesis import given, settings, strategies as st

from mtcf.matrix import RatingsMatrix, UnknownUserError, build_matrix

from conftest import matrix_from, random_rows


def test_user_mean():
    m = build_matrix([(1, 1, 4.0), (1, 2, 2.0)])
    assert m.mean(1) == 3.0


def test_empty():
    m = build_matrix([])
    assert (m.n_users, m.n_items, m.n_ratings) == (0, 0, 0)


def test_duplicate_last_wins():
    m = build_matrix([(1, 1, 4.0), (1, 1, 2.0)])
    assert m.ratings_of(1) == [(1, 2.0)]


def test_rejects_out_of_range():
    with pytest.raises(ValueError):
        RatingsMatrix([1], [1], [6.0])


def test_indexes_agree(small_matrix):
    from_users = {(u, i, r) for u, row in small_matrix.user_index.items() for i, r in row}
    from_items = {(u, i, r) for i, col in small_matrix.item_index.items() for u, r in col}
    assert from_users == from_items
    assert len(from_users) == small_matrix.n_ratings == 10


def test_co_rated(small_matrix):
    m = matrix_from({1: {1: 4.0, 2: 3.0}, 2: {2: 5.0, 3: 1.0}, 3: {7: 2.0}})
    assert m.co_rated(1, 2) == [(2, 3.0, 5.0)]
    assert m.co_rated(1, 3) == []
    assert m.co_rated(1, 1) == [(1, 4.0, 4.0), (2, 3.0, 3.0)]


def test_user_item_sets():
    m = matrix_from({1: {1: 1.0, 2: 1.0, 3: 1.0}, 2: {2: 5.0, 3: 5.0, 4: 5.0}, 3: {1: 2.0, 2: 2.0, 3: 2.0}})
    assert m.user_item_sets(1, 2) == (2, 4)
    assert m.user_item_sets(1, 3) == (3, 3)


def test_user_with_zero_items_is_absent():
    # a user with no ratings has no row, so the pair can only be asked of users that exist
    m = matrix_from({1: {1: 1.0, 5: 2.0}})
    with pytest.raises(UnknownUserError):
        m.user_item_sets(1, 2)


def test_unknown_user(small_matrix):
    with pytest.raises(UnknownUserError):
        small_matrix.co_rated(1, 99)
    with pytest.raises(KeyError):
        small_matrix.mean(99)


def test_pickle_roundtrip(small_matrix):
    import pickle
    m = pickle.loads(pickle.dumps(small_matrix))
    assert m.triples() == small_matrix.triples()
    assert m.user_dev.tobytes() == small_matrix.user_dev.tobytes()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_brute_force(seed):
    rows = random_rows(seed)
    m = matrix_from(rows)
    triples = sorted((u, i, r) for u, items in rows.items() for i, r in items.items())
    assert sorted(m.triples()) == triples
    for u, items in m.user_index.items():
        ids = [i for i, _ in items]
        assert ids == sorted(set(ids))
        assert m.mean(u) == pytest.approx(sum(rows[u].values()) / len(rows[u]), abs=1e-12)
    for i, users in m.item_index.items():
        ids = [u for u, _ in users]
        assert ids == sorted(set(ids))
    users = sorted(rows)
    for a in users[:5]:
        for b in users:
            co = sorted(set(rows[a]) & set(rows[b]))
            assert m.co_rated(a, b) == [(i, rows[a][i], rows[b][i]) for i in co]
            assert m.co_rated(b, a) == [(i, y, x) for i, x, y in m.co_rated(a, b)]
            inter, union = m.user_item_sets(a, b)
            assert (inter, union) == (len(co), len(set(rows[a]) | set(rows[b])))
