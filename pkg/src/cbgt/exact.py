"""Balanced periodic schedules for arbitrary matroid instances.

Every element e needs ``T*g(e)`` cuts per period, the i-th of which must land
in the window ``[floor((i-1)/g)+1, ceil(i/g)]``. Over the ground set
``E x [T]`` this is the intersection of two matroids: one copy of M per day,
and per element the transversal matroid of times against windows. A common
basis of size ``T*r(M)`` is exactly a schedule with discrepancy below one.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .model import (
    DEFAULT_PRODUCT_BUDGET,
    CbgtInstance,
    InstanceError,
    Schedule,
    TooLargeError,
    lcm_of_denominators,
    strip_zero_rate,
)
from .simulator import SimulationReport, simulate
from .systems import DirectSum, SetSystem, UnsupportedError, matroid_intersection

RAISE_LIMIT = 14  # largest n for which the witness-free raise enumerates subsets
RESTARTS = 32  # seeded restarts when repair leaves a gap of height 2 or more


class CutWindow(NamedTuple):
    lo: int
    hi: int


def cut_windows(g, T: int) -> list:
    """The ``T*g`` windows of an element with rate ``g`` over a period of T days."""
    g = Fraction(g)
    if g <= 0 or g > 1:
        raise ValueError(f"rate {g} must lie in (0, 1]")
    cuts = T * g
    if cuts.denominator != 1:
        raise ValueError(f"T*g = {cuts} is not an integer")
    out = []
    for i in range(1, int(cuts) + 1):
        out.append(CutWindow(math.floor((i - 1) / g) + 1, math.ceil(i / g)))
    for i, (a, b) in enumerate(zip(out, out[1:]), 1):
        if (i / g).denominator == 1:
            ok = a.hi + 1 == b.lo
        else:
            ok = a.lo < a.hi == b.lo
        if not ok:
            raise AssertionError(f"windows {i} and {i + 1} do not chain: {a}, {b}")
    return out


def me_is_independent(windows: Sequence[CutWindow], times) -> bool:
    """Can the sorted times be matched to strictly increasing windows?

    Greedy: give each time the first unused window that still reaches it.
    """
    j = 0
    for t in sorted(times):
        while j < len(windows) and windows[j].hi < t:
            j += 1
        if j == len(windows) or windows[j].lo > t:
            return False
        j += 1
    return True


def fractional_matching(g, T: int) -> dict:
    """The explicit fractional matching between times and windows.

    Keys are ``(i, t)`` for window index i (1-based) and day t; every day
    carries total weight g and every window total weight 1.
    """
    g = Fraction(g)
    x = {}
    for i, (lo, hi) in enumerate(cut_windows(g, T), 1):
        for t in range(lo, hi + 1):
            if t == lo:
                x[(i, t)] = t * g - i + 1
            elif t == hi:
                x[(i, t)] = i - (t - 1) * g
            else:
                x[(i, t)] = g
    return x


class WindowMatroid(SetSystem):
    """Times ``0..T-1`` (day ``t+1``) against the windows of one element."""

    tag = "windows"

    def __init__(self, windows: Sequence[CutWindow], T: int):
        self.windows = tuple(windows)
        self.n = T
        # first and last window index reaching each day
        self.first = [0] * (T + 1)
        self.last = [0] * (T + 1)
        j = 0
        for t in range(1, T + 1):
            while self.windows[j].hi < t:
                j += 1
            self.first[t] = j
            k = j
            while k + 1 < len(self.windows) and self.windows[k + 1].lo <= t:
                k += 1
            self.last[t] = k

    def is_independent(self, X) -> bool:
        return me_is_independent(self.windows, (x + 1 for x in self._members(X)))

    def can_add(self, I, x) -> bool:
        return me_is_independent(self.windows, [y + 1 for y in I] + [x + 1])

    def rank(self, X=None) -> int:
        X = range(self.n) if X is None else self._members(X)
        count, j = 0, 0
        for t in sorted(x + 1 for x in X):
            while j < len(self.windows) and self.windows[j].hi < t:
                j += 1
            if j < len(self.windows) and self.windows[j].lo <= t:
                count += 1
                j += 1
        return count

    def exchange_oracle(self, I):
        I = sorted(I)

        def f(x):
            P = sorted(I + [x])
            times = [p + 1 for p in P]
            if me_is_independent(self.windows, times):
                return None
            k = P.index(x)
            # the run P[a..b] overflows its windows iff right[b] > left[a]
            left = [a - self.first[t] for a, t in enumerate(times)]
            right = [b - self.last[t] for b, t in enumerate(times)]
            max_right = max(right[k:])
            min_left = min(left[: k + 1])
            a = max(a for a in range(k + 1) if left[a] < max_right)
            b = min(b for b in range(k, len(P)) if right[b] > min_left)
            return [y for y in P[a : b + 1] if y != x]

        return f

    def restrict(self, keep):
        raise UnsupportedError("window matroids are internal")

    def __repr__(self):
        return f"WindowMatroid({list(self.windows)})"


def normalize_full_rank(inst: CbgtInstance) -> CbgtInstance:
    """Extend every witness set to a basis (ascending element ids)."""
    if inst.witness is None:
        raise InstanceError("normalization needs a witness convex combination; supply one")
    sys = inst.system
    merged: dict = {}
    for s, w in inst.witness:
        basis = set(s)
        for e in range(inst.n):
            if e not in basis and sys.can_add(basis, e):
                basis.add(e)
        key = frozenset(basis)
        merged[key] = merged.get(key, Fraction(0)) + w
    witness = tuple(sorted(merged.items(), key=lambda kv: sorted(kv[0])))
    growth = [Fraction(0)] * inst.n
    for s, w in witness:
        for e in s:
            growth[e] += w
    return CbgtInstance(inst.labels, sys, tuple(growth), witness)


def raise_to_full_rank(inst: CbgtInstance) -> CbgtInstance:
    """Witness-free normalization: raise each rate, in id order, as far as
    every rank constraint allows. Enumerates subsets, so only for small n."""
    if inst.n > RAISE_LIMIT:
        raise InstanceError(f"no witness and n = {inst.n} > {RAISE_LIMIT}; supply a witness")
    sys = inst.system
    g = list(inst.growth)
    subsets = [frozenset(c) for size in range(1, inst.n + 1)
               for c in itertools.combinations(range(inst.n), size)]
    ranks = {X: sys.rank(X) for X in subsets}
    for e in range(inst.n):
        slack = min(ranks[X] - sum(g[y] for y in X) for X in subsets if e in X)
        if slack < 0:
            raise InstanceError(f"growth exceeds rank on some set containing element {e}")
        g[e] += min(slack, 1 - g[e])
    if sum(g) != sys.rank():
        raise AssertionError("raised growth is not a base of the matroid")
    return CbgtInstance(inst.labels, sys, tuple(g), None)


def _full_rank(inst: CbgtInstance) -> CbgtInstance:
    if sum(inst.growth) == inst.system.rank():
        return inst
    if inst.witness is not None:
        return normalize_full_rank(inst)
    return raise_to_full_rank(inst)


def _shuffled_start(per_day: SetSystem, per_element: SetSystem, seed: int) -> set:
    order = list(range(per_day.n))
    random.Random(seed).shuffle(order)
    chosen: set = set()
    for x in order:
        if per_day.can_add(chosen, x) and per_element.can_add(chosen, x):
            chosen.add(x)
    return chosen


def _edf_start(sys: SetSystem, windows: list, T: int, n: int) -> set:
    """A common independent set built day by day, earliest deadline first."""
    nxt = [0] * n
    chosen = set()
    for t in range(1, T + 1):
        ready = []
        for e in range(n):
            w = windows[e]
            while nxt[e] < len(w) and w[nxt[e]].hi < t:
                nxt[e] += 1
            if nxt[e] < len(w) and w[nxt[e]].lo <= t:
                ready.append((w[nxt[e]].hi, e))
        cut: set = set()
        for _, e in sorted(ready):
            if sys.can_add(cut, e):
                cut.add(e)
                nxt[e] += 1
                chosen.add((t - 1) * n + e)
    return chosen


def _long_gaps(core: list, e: int, g: Fraction) -> int:
    """Cyclic gaps of e whose grow-then-cut height reaches 2."""
    days = [t for t, c in enumerate(core) if e in c]
    T = len(core)
    gaps = [b - a for a, b in zip(days, days[1:])] + [days[0] + T - days[-1]]
    return sum(1 for d in gaps if d * g >= 2)


def repair_long_gaps(sys: SetSystem, growth, windows: list, core: list, max_rounds: int = 1000) -> list:
    """Move cuts inside their windows until no gap reaches height 2.

    A move shifts one cut of e to another day, optionally swapping with a cut
    of f on that day. Every move keeps each day independent and each element
    matched to its windows, so discrepancy stays below one; a move is taken
    only if it strictly lowers the number of long gaps.
    """
    core = [set(c) for c in core]
    n, T = len(growth), len(core)
    bad = [_long_gaps(core, e, growth[e]) for e in range(n)]

    def days_of(e):
        return [t + 1 for t, c in enumerate(core) if e in c]

    def try_move(e, src, dst, f):
        moved = [(e, src, dst)] + ([(f, dst, src)] if f is not None else [])
        for x, a, b in moved:
            core[a].discard(x)
        for x, a, b in moved:
            core[b].add(x)
        touched = {x for x, _, _ in moved}
        ok = (sys.is_independent(core[src]) and sys.is_independent(core[dst])
              and all(me_is_independent(windows[x], days_of(x)) for x in touched))
        if ok:
            after = {x: _long_gaps(core, x, growth[x]) for x in touched}
            if sum(after.values()) < sum(bad[x] for x in touched):
                for x, v in after.items():
                    bad[x] = v
                return True
        for x, a, b in moved:
            core[b].discard(x)
        for x, a, b in moved:
            core[a].add(x)
        return False

    for _ in range(max_rounds):
        if not any(bad):
            break
        progressed = False
        for e in (x for x in range(n) if bad[x]):
            for src in [t for t, c in enumerate(core) if e in c]:
                for dst in range(T):
                    if e in core[dst]:
                        continue
                    if try_move(e, src, dst, None):
                        progressed = True
                        break
                    if any(try_move(e, src, dst, f) for f in sorted(core[dst]) if f not in core[src]):
                        progressed = True
                        break
                if progressed:
                    break
            if progressed:
                break
        if not progressed:
            break
    return [frozenset(c) for c in core]


@dataclass(frozen=True)
class ExactResult:
    schedule: Schedule  # on the caller's element ids
    report: SimulationReport  # against the caller's rates
    balanced_report: SimulationReport  # against the full-rank rates the schedule was built for
    normalized: CbgtInstance
    period: int


def exact_schedule(inst: CbgtInstance, max_product: int = DEFAULT_PRODUCT_BUDGET) -> ExactResult:
    """Periodic schedule with discrepancy < 1 for the full-rank rates, via a
    common basis of the per-day and per-element matroids.

    Discrepancy below one bounds idle runs by 2/g but lets a grow-then-cut
    gap reach height 2, so the basis is repaired (and, failing that, rebuilt
    from seeded starts) until no gap does. The reports show what was reached.
    """
    if not inst.system.is_matroid:
        raise UnsupportedError("the exact scheduler needs a matroid")
    stripped, removed = strip_zero_rate(inst)
    if stripped.n == 0:
        raise InstanceError("every element has rate zero; nothing to schedule")
    keep = [e for e in range(inst.n) if e not in set(removed)]
    full = _full_rank(stripped)
    n, M = full.n, full.system
    T, counts = lcm_of_denominators(full.growth)
    if n * T > max_product:
        raise TooLargeError(
            f"pseudo-polynomial blowup: T = {T}, |E|*T = {n * T} exceeds the budget {max_product}",
            partial=T)

    windows = [cut_windows(g, T) for g in full.growth]
    per_day = DirectSum([M] * T)
    per_element = DirectSum(
        [WindowMatroid(w, T) for w in windows],
        [[(t - 1) * n + e for t in range(1, T + 1)] for e in range(n)],
    )
    r = M.rank()

    def decode(start):
        basis = matroid_intersection(per_day, per_element, initial=start)
        if len(basis) != T * r:
            raise AssertionError(
                f"common independent set has size {len(basis)}, expected T*r = {T * r}; oracle bug")
        core = [set() for _ in range(T)]
        for x in basis:
            t, e = divmod(x, n)
            core[t].add(e)
        for e in range(n):
            got = sum(e in c for c in core)
            if got != counts[e]:
                raise AssertionError(f"element {e} cut {got} times per period, expected {counts[e]}")
        core = repair_long_gaps(M, full.growth, windows, core)
        return core, sum(_long_gaps(core, e, full.growth[e]) for e in range(n))

    core, long_gaps = decode(_edf_start(M, windows, T, n))
    for seed in range(RESTARTS):
        if not long_gaps:
            break
        other, other_gaps = decode(_shuffled_start(per_day, per_element, seed))
        if other_gaps < long_gaps:
            core, long_gaps = other, other_gaps

    balanced = simulate(full, Schedule(tuple(core), periodic=True), 3 * T)
    if not (balanced.valid and balanced.max_discrepancy < 1):
        raise AssertionError(
            f"decoded schedule fails verification: valid={balanced.valid}, "
            f"d={balanced.max_discrepancy}, h={balanced.max_height}")

    schedule = Schedule(tuple(frozenset(keep[e] for e in c) for c in core), periodic=True)
    report = simulate(inst, schedule, 3 * T)
    return ExactResult(schedule, report, balanced, full, T)
