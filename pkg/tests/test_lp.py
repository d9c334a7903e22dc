from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cbgt.lp import Unbounded, maximize


def test_textbook_problem():
    sol = maximize([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert sol.value == 36 and sol.x == (2, 6)
    assert sol.duals == (0, F(3, 2), 1)


def test_unbounded():
    with pytest.raises(Unbounded):
        maximize([1, 1], [[1, -1]], [1])


def test_degenerate_problem_terminates():
    sol = maximize([10, -57, -9, -24], [[F(1, 2), F(-11, 2), F(-5, 2), 9],
                                         [F(1, 2), F(-3, 2), F(-1, 2), 1], [1, 0, 0, 0]], [0, 0, 1])
    assert sol.value == 1


@given(st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(1, 6), min_size=3, max_size=3), st.lists(st.integers(1, 5), min_size=4, max_size=4))
def test_strong_duality(A, c, b):
    b = b[: len(A)]
    try:
        sol = maximize(c, A, b)
    except Unbounded:
        assert any(all(row[j] == 0 for row in A) for j in range(3))
        return
    assert all(x >= 0 for x in sol.x) and all(y >= 0 for y in sol.duals)
    for row, bi in zip(A, b):
        assert sum(a * x for a, x in zip(row, sol.x)) <= bi
    for j in range(3):
        assert sum(A[i][j] * sol.duals[i] for i in range(len(A))) >= c[j]
    assert sol.value == sum(ci * x for ci, x in zip(c, sol.x)) == sum(bi * y for bi, y in zip(b, sol.duals))
