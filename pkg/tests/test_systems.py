import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cbgt.bench import brute_max_common, brute_max_weight
from cbgt.generators import gen_binomial_lb, gen_random_normalized
from cbgt.model import CbgtInstance, DomainError
from cbgt.systems import (
    DirectSum,
    Explicit,
    Graphic,
    Laminar,
    Partition,
    SetSystem,
    Transversal,
    Uniform,
    UnsupportedError,
    matroid_intersection,
    maximal_independent_sets,
    system_from_json,
    validate_growth,
)

MATROIDS = ("uniform", "partition", "graphic", "laminar", "transversal", "explicit")
TRIANGLE = [(0, 1), (1, 2), (0, 2)]


def test_small_independence_cases():
    assert not Uniform(3, 2).is_independent({0, 1, 2})
    assert not Laminar(3, [[0, 1, 2]], [1]).is_independent({0, 1})
    assert Uniform(3, 2).is_independent(set())


def test_forest_cut_sets_of_the_ten_edge_graph(graph10):
    # one edge from each color class of the elimination coloring is a forest
    sys = graph10.system
    for cut in ({8, 6, 0, 3, 5}, {9, 7, 1, 4, 5}, {8, 6, 2, 4, 5}):
        assert sys.is_independent(cut)


def test_ranks():
    assert Uniform(5, 2).rank({0, 1, 2, 3}) == 2
    assert Graphic(3, TRIANGLE).rank() == 2


def test_rank_of_connected_six_vertex_graph(graph10):
    assert graph10.system.rank() == 5


def test_domain_errors():
    with pytest.raises(DomainError):
        Uniform(3, 1).is_independent({3})
    with pytest.raises(DomainError):
        Uniform(3, 1).is_independent({-1})


def test_explicit_max_weight_and_matroid_flag():
    sys = Explicit(3, [[0], [1, 2]])
    assert sys.max_weight_independent([5, 1, 1]) == {0}
    assert not sys.is_matroid
    assert sys.rank() == 2 and sys.rank({0, 1}) == 1


def test_one_uniform_max_weight_picks_the_tallest():
    assert Uniform(4, 1).max_weight_independent([F(1, 2), F(3, 2), F(1), F(0)]) == {1}


def test_binomial_oracle_finds_a_star_containing_the_target():
    inst = gen_binomial_lb(2)
    gens = inst.system.generators
    for target in range(inst.n):
        w = [1 if e == target else 0 for e in range(inst.n)]
        got = inst.system.max_weight_independent(w)
        assert target in got
        assert any(got <= G for G in gens)


def test_growth_validation():
    rates = (F(1, 10), F(1, 5), F(1, 2), F(1, 2), F(3, 10))
    assert validate_growth(CbgtInstance(tuple("abcde"), Uniform(5, 2), rates))
    bad = validate_growth(CbgtInstance(("a", "b"), Uniform(2, 1), (F(3, 5), F(3, 5))))
    assert not bad and bad.violation[0] == (0, 1)
    assert validate_growth(gen_binomial_lb(2)).valid
    assert set(gen_binomial_lb(2).growth) == {F(1, 2)}


@pytest.mark.parametrize("m1, m2, size", [
    (Uniform(5, 3), Uniform(5, 3), 3),
    (Graphic(3, TRIANGLE), Partition([[0], [1, 2]], [1, 1]), 2),
])
def test_intersection_small(m1, m2, size):
    got = matroid_intersection(m1, m2)
    assert len(got) == size and m1.is_independent(got) and m2.is_independent(got)


def _random_system(kind, n, seed):
    return gen_random_normalized(kind, n, seed, witness=True).system


def _all_subsets(n):
    for size in range(n + 1):
        yield from itertools.combinations(range(n), size)


@given(st.sampled_from(MATROIDS), st.integers(1, 7), st.integers(0, 10**6))
def test_generated_matroids_satisfy_the_axioms(kind, n, seed):
    sys = _random_system(kind, n, seed)
    indep = {frozenset(X) for X in _all_subsets(n) if sys.is_independent(X)}
    assert frozenset() in indep
    for X in indep:
        assert all(X - {x} in indep for x in X)
    # augmentation
    for X in indep:
        for Y in indep:
            if len(X) < len(Y):
                assert any(X | {y} in indep for y in Y - X)


@given(st.sampled_from(MATROIDS), st.integers(1, 7), st.integers(0, 10**6))
def test_rank_is_size_of_largest_independent_subset(kind, n, seed):
    sys = _random_system(kind, n, seed)
    for X in _all_subsets(n):
        best = max(len(Y) for Y in _all_subsets(n) if set(Y) <= set(X) and sys.is_independent(Y))
        assert sys.rank(X) == best


@given(st.sampled_from(MATROIDS), st.integers(1, 8), st.integers(0, 10**6), st.data())
def test_rank_is_monotone_lipschitz_and_submodular(kind, n, seed, data):
    sys = _random_system(kind, n, seed)
    ground = st.sets(st.integers(0, n - 1))
    X, Y = data.draw(ground), data.draw(ground)
    r = sys.rank
    assert r(X & Y) <= r(X) <= r(X & Y) + len(X - Y)
    assert r(X) + r(Y) >= r(X | Y) + r(X & Y)
    assert sys.is_independent(X) == (r(X) == len(X))


@given(st.sampled_from(MATROIDS + ("system",)), st.integers(1, 8), st.integers(0, 10**6),
       st.lists(st.integers(-3, 9), min_size=8, max_size=8))
def test_max_weight_matches_enumeration(kind, n, seed, weights):
    sys = _random_system(kind, n, seed)
    w = weights[:n]
    got = sys.max_weight_independent(w)
    assert sys.is_independent(got)
    assert sum(w[e] for e in got) == brute_max_weight(sys, w)


@given(st.sampled_from(MATROIDS), st.integers(1, 7), st.integers(0, 10**6), st.data())
def test_exchange_oracle_matches_the_definition(kind, n, seed, data):
    sys = _random_system(kind, n, seed)
    bases = maximal_independent_sets(sys)
    I = data.draw(st.sampled_from(bases))
    I = frozenset(data.draw(st.sets(st.sampled_from(sorted(I)))) if I else set())
    f = sys.exchange_oracle(I)
    generic = SetSystem.exchange_oracle(sys, I)
    for x in range(n):
        if x not in I:
            assert f(x) == generic(x)


@given(st.sampled_from(MATROIDS), st.sampled_from(MATROIDS), st.integers(1, 5), st.integers(0, 10**6))
def test_intersection_cardinality_matches_brute_force(k1, k2, n, seed):
    m1 = _random_system(k1, n, seed)
    m2 = _random_system(k2, n, seed + 1)
    got = matroid_intersection(m1, m2)
    assert m1.is_independent(got) and m2.is_independent(got)
    assert len(got) == brute_max_common(m1, m2)


def test_direct_sum_ranks_add_up():
    parts = [Uniform(2, 1), Graphic(3, TRIANGLE)]
    ds = DirectSum(parts)
    assert ds.n == 5 and ds.rank() == 3
    assert ds.is_independent({0, 2, 3}) and not ds.is_independent({0, 1})


@pytest.mark.parametrize("kind", MATROIDS + ("system",))
def test_system_json_round_trip(kind):
    sys = _random_system(kind, 5, 3)
    back = system_from_json(sys.to_json())
    for X in _all_subsets(5):
        assert back.is_independent(X) == sys.is_independent(X)


def test_restriction_of_transversal_and_laminar():
    t = Transversal([[0], [0], [1]]).restrict([1, 2])
    assert t.is_independent({0, 1})
    lam = Laminar(4, [[0, 1], [0, 1, 2, 3]], [1, 2]).restrict([0, 1, 3])
    assert not lam.is_independent({0, 1}) and lam.is_independent({0, 2})
