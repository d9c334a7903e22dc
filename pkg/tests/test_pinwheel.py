import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cbgt.bench import half_density_cps
from cbgt.exact import exact_schedule
from cbgt.generators import gen_binomial_lb, gen_random_normalized
from cbgt.model import CbgtInstance, InstanceError, Schedule, TooLargeError
from cbgt.pinwheel import (
    CpsInstance,
    cbgt_from_half_density,
    check_certificate,
    cps_from_cbgt,
    cps_from_json,
    cps_to_json,
    decide_schedulable,
    density,
    verify_pinwheel,
)
from cbgt.simulator import simulate
from cbgt.systems import Uniform, maximal_independent_sets


def one_uniform_cps(*periods):
    return CpsInstance(tuple("abcdefgh"[: len(periods)]), Uniform(len(periods), 1), periods)


def survives(cps):
    """Independent oracle: prune states without a successor until stable;
    schedulable iff the all-zero state survives."""
    a = cps.periods
    states = set(itertools.product(*(range(x) for x in a)))
    moves = maximal_independent_sets(cps.system)

    def succ(s):
        for J in moves:
            t = tuple(0 if e in J else v + 1 for e, v in enumerate(s))
            if all(v < a[e] for e, v in enumerate(t)):
                yield t

    changed = True
    while changed:
        alive = {s for s in states if any(t in states for t in succ(s))}
        changed = alive != states
        states = alive
    return tuple([0] * cps.n) in states


def test_reduction_periods():
    inst = CbgtInstance(("a", "b"), Uniform(2, 1), (F(1, 2), F(1, 2)))
    assert cps_from_cbgt(inst, 2).periods == (4, 4)
    inv = CbgtInstance(tuple("abc"), Uniform(3, 1), (F(1), F(2, 3), F(1, 3)))
    assert cps_from_cbgt(inv, 2).periods == (2, 3, 6)


def test_reduction_errors():
    inst = CbgtInstance(("a", "b"), Uniform(2, 1), (F(0), F(1)))
    with pytest.raises(InstanceError):
        cps_from_cbgt(inst, 2)
    with pytest.raises(InstanceError):
        cps_from_cbgt(CbgtInstance(("a",), Uniform(1, 1), (F(1),)), F(1, 2))


def test_binomial_with_quarter_log_target_is_unschedulable():
    inst = gen_binomial_lb(2)
    c = F(math.log2(inst.n)) / 4
    cps = cps_from_cbgt(inst, c)
    assert set(cps.periods) == {1}
    assert not decide_schedulable(cps).schedulable


def test_alternation_meets_period_two():
    cps = one_uniform_cps(2, 2)
    v = verify_pinwheel(cps, Schedule((frozenset([0]), frozenset([1])), periodic=True))
    assert v.ok and v.recurrence == (2, 2)
    d = decide_schedulable(cps)
    assert d.schedulable and sorted(map(sorted, d.witness.core)) == [[0], [1]]


@pytest.mark.parametrize("x", range(1, 13))
def test_periods_two_three_x_are_unschedulable(x):
    cps = one_uniform_cps(2, 3, x)
    assert not decide_schedulable(cps).schedulable
    assert not survives(cps)


def test_periods_two_three_five():
    cps = one_uniform_cps(2, 3, 5)
    assert density(cps).rho == F(31, 30)
    assert not decide_schedulable(cps).schedulable


def test_verify_reports_the_first_missed_window():
    cps = one_uniform_cps(2, 3)
    good = Schedule((frozenset([0]), frozenset([0]), frozenset([1])), periodic=True)
    assert verify_pinwheel(cps, good).ok
    v = verify_pinwheel(cps, Schedule((frozenset([0]), frozenset([1]), frozenset([1])), periodic=True))
    assert not v.ok and v.recurrence == (3, 2) and v.violation is not None


def test_state_budget():
    with pytest.raises(TooLargeError):
        decide_schedulable(one_uniform_cps(50, 50, 50), budget=1000)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=3))
def test_search_agrees_with_fixed_point_on_one_uniform(periods):
    cps = one_uniform_cps(*periods)
    d = decide_schedulable(cps)
    assert d.schedulable == survives(cps)
    if d.schedulable:
        assert verify_pinwheel(cps, d.witness).ok


@given(st.sampled_from(("uniform", "partition", "graphic", "explicit")), st.integers(1, 4),
       st.integers(0, 10**6), st.lists(st.integers(1, 4), min_size=4, max_size=4))
def test_search_agrees_with_fixed_point_on_matroids(kind, n, seed, periods):
    sys = gen_random_normalized(kind, n, seed).system
    cps = CpsInstance(tuple(map(str, range(n))), sys, periods[:n])
    assert decide_schedulable(cps).schedulable == survives(cps)


def test_density_closed_form():
    assert density(one_uniform_cps(2, 3, 6)).rho == 1


@given(st.lists(st.integers(1, 9), min_size=1, max_size=5))
def test_lp_density_matches_closed_form_on_one_uniform(periods):
    cps = one_uniform_cps(*periods)
    assert density(cps, method="lp").rho == sum(F(1, a) for a in periods) == density(cps).rho


@pytest.mark.parametrize("c", [2, 4])
def test_binomial_certificate_has_weight_two_over_c(c):
    inst = gen_binomial_lb(2)
    cps = cps_from_cbgt(inst, c)
    cert = tuple((s, w * 2 / c) for s, w in inst.witness)
    assert check_certificate(cps, cert) == F(2, c)
    assert density(cps).rho <= F(2, c)


@pytest.mark.parametrize("seed", range(6))
def test_half_density_instances_are_schedulable(seed):
    cps = half_density_cps("uniform" if seed % 2 else "graphic", 3 + seed % 3, seed)
    res = density(cps)
    assert res.rho <= F(1, 2)
    doubled = tuple((s, 2 * w) for s, w in res.certificate)
    assert check_certificate(cps, doubled) == 2 * res.rho <= 1
    inst = cbgt_from_half_density(cps, res.certificate)
    assert inst.growth == tuple(F(2, a) for a in cps.periods)
    sched = exact_schedule(inst).schedule
    assert verify_pinwheel(cps, sched).ok


def test_half_density_rejects_heavy_certificates():
    cps = one_uniform_cps(2, 2)
    with pytest.raises(InstanceError):
        cbgt_from_half_density(cps, ((frozenset([0]), F(1, 2)), (frozenset([1]), F(1, 2))))


@given(st.sampled_from(("uniform", "partition", "graphic", "laminar", "explicit")), st.integers(1, 6),
       st.integers(0, 10**6), st.integers(1, 8), st.sampled_from([2, 4]), st.data())
def test_pinwheel_check_agrees_with_height_bound(kind, n, seed, length, c, data):
    inst = gen_random_normalized(kind, n, seed)
    if not all(inst.growth):
        return
    bases = maximal_independent_sets(inst.system)
    core = tuple(data.draw(st.lists(st.sampled_from(bases), min_size=length, max_size=length)))
    sched = Schedule(core, periodic=True)
    rep = simulate(inst, sched, 2 * length)
    assert verify_pinwheel(cps_from_cbgt(inst, c), sched).ok == (rep.max_height <= c)


def test_cps_json_round_trip():
    cps = CpsInstance(("a", "b"), Uniform(2, 1), (2, 2), ((frozenset([0]), F(1, 2)), (frozenset([1]), F(1, 2))))
    back = cps_from_json(cps_to_json(cps))
    assert back.periods == cps.periods and back.certificate == cps.certificate and back.labels == cps.labels
