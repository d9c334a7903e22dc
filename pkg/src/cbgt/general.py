"""Logarithmic-height schedulers for arbitrary set systems.

Elements are split at ``tau = c ln n / n`` into slow and fast ones. Slow
elements are served round robin; fast ones by either a randomized block drawn
from the witness or the greedy potential rule ``min_I Phi(h, I)``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional

from .model import CbgtInstance, InstanceError, Schedule

DEFAULT_C = 6.0
EXP_CAP = 700.0
MAX_DRAWS = 64
REL_TOL = 1e-9


@dataclass(frozen=True)
class SpeedSplit:
    c: float
    threshold: float
    slow: frozenset
    fast: frozenset


def speed_split(inst: CbgtInstance, c: float = DEFAULT_C) -> SpeedSplit:
    if c <= 2:
        raise ValueError(f"c must exceed 2, got {c}")
    n = inst.n
    tau = c * math.log(n) / n if n > 1 else 0.0
    fast = frozenset(e for e, g in enumerate(inst.growth) if g > tau)
    return SpeedSplit(c, tau, frozenset(range(n)) - fast, fast)


def round_robin_slow(inst: CbgtInstance) -> Schedule:
    """Period-n schedule whose e-th day cuts an independent set containing e.

    The oracle weight is ``(n+1)`` on e and 1 elsewhere: any optimum contains
    e whenever some independent set does, and is as large as possible beyond it.
    """
    sets = []
    for e in range(inst.n):
        w = [1] * inst.n
        w[e] = inst.n + 1
        I = inst.system.max_weight_independent(w)
        if e not in I:
            if inst.growth[e] > 0:
                raise InstanceError(f"element {e} has positive rate but lies in no independent set")
        sets.append(I)
    return Schedule(tuple(sets), periodic=True)


def _exp(x: float, state=None) -> float:
    if x > EXP_CAP:
        if state is not None:
            state.saturated = True
        x = EXP_CAP
    return math.exp(x)


@dataclass
class PotentialState:
    """Fast-element heights in the greedy's own bookkeeping: a cut element
    restarts at its rate, an uncut one grows by it."""

    heights: dict  # fast element -> Fraction
    step: int = 0
    saturated: bool = False
    history: list = field(default_factory=list)  # (phi_before, phi_after, expectation or None)

    @classmethod
    def start(cls, split: SpeedSplit) -> "PotentialState":
        return cls({e: Fraction(0) for e in sorted(split.fast)})

    def potential(self) -> float:
        return math.fsum(_exp(float(h), self) for h in self.heights.values())


def potential_of_cut(inst: CbgtInstance, state: PotentialState, cut) -> float:
    """Phi(h, I): uncut fast elements contribute exp(h+g), cut ones exp(g)."""
    total = []
    for e, h in state.heights.items():
        g = float(inst.growth[e])
        total.append(_exp(g, state) if e in cut else _exp(float(h) + g, state))
    return math.fsum(total)


def potential_weights(inst: CbgtInstance, state: PotentialState) -> list:
    w = [0.0] * inst.n
    for e, h in state.heights.items():
        g = float(inst.growth[e])
        w[e] = _exp(float(h) + g, state) - _exp(g, state)
    return w


def _advance(inst: CbgtInstance, state: PotentialState, cut) -> None:
    for e in state.heights:
        state.heights[e] = inst.growth[e] if e in cut else state.heights[e] + inst.growth[e]
    state.step += 1


def greedy_potential_step(inst: CbgtInstance, split: SpeedSplit, state: PotentialState) -> frozenset:
    """One step of the greedy rule, realised as a max-weight oracle call."""
    before = state.potential()
    expectation = None
    if inst.witness is not None:
        expectation = math.fsum(float(w) * potential_of_cut(inst, state, s) for s, w in inst.witness)
    cut = set(inst.system.max_weight_independent(potential_weights(inst, state)))
    # zero-weight elements ride along in id order; Phi cannot go up
    for e in sorted(state.heights):
        if e not in cut and inst.system.can_add(cut, e):
            cut.add(e)
    cut = frozenset(cut)
    chosen = potential_of_cut(inst, state, cut)
    _advance(inst, state, cut)
    after = state.potential()
    if not math.isclose(after, chosen, rel_tol=REL_TOL):
        raise AssertionError("potential after the step differs from Phi(h, I)")
    if expectation is not None and after > expectation * (1 + REL_TOL):
        raise AssertionError(f"greedy cut has potential {after} above the witness average {expectation}")
    state.history.append((before, after, expectation))
    return cut


def recursion_holds(split: SpeedSplit, n: int, before: float, after: float) -> bool:
    """Phi(h_{t+1}) <= e*n + (1 - tau^3) * Phi(h_t), up to float rounding."""
    rho = 1 - split.threshold ** 3
    return after <= (math.e * n + rho * before) * (1 + REL_TOL)


def greedy_potential_schedule(inst: CbgtInstance, c: float = DEFAULT_C, steps: Optional[int] = None):
    """Run the greedy rule from zero heights; returns ``(schedule, state, split)``."""
    split = speed_split(inst, c)
    state = PotentialState.start(split)
    cuts = [greedy_potential_step(inst, split, state) for _ in range(inst.n if steps is None else steps)]
    return Schedule(tuple(cuts)), state, split


def _sampler(inst: CbgtInstance, rng: random.Random):
    if inst.witness is None:
        raise InstanceError("randomized blocks are drawn from the witness; none given")
    terms = [(s, w) for s, w in inst.witness if w > 0]
    D = math.lcm(*(w.denominator for _, w in terms))
    bounds, acc = [], 0
    for _, w in terms:
        acc += int(w * D)
        bounds.append(acc)

    def draw():
        x = rng.randrange(D)
        return terms[next(i for i, b in enumerate(bounds) if x < b)][0]

    return draw


@dataclass(frozen=True)
class FastBlock:
    sets: tuple
    max_height: Fraction  # largest height inside one block started from zero
    bound: float  # c ln n
    draws: int


def block_max_height(inst: CbgtInstance, sets) -> Fraction:
    h = [Fraction(0)] * inst.n
    best = Fraction(0)
    for cut in sets:
        for e in range(inst.n):
            h[e] += inst.growth[e]
            best = max(best, h[e])
            if e in cut:
                h[e] = Fraction(0)
    return best


def randomized_fast_block(inst: CbgtInstance, split: SpeedSplit, seed: int,
                          max_draws: int = MAX_DRAWS) -> FastBlock:
    """Rejection-sample n i.i.d. witness sets until no height exceeds c ln n."""
    rng = random.Random(seed)
    draw = _sampler(inst, rng)
    n = inst.n
    bound = split.c * math.log(n) if n > 1 else float(split.c)
    for k in range(1, max_draws + 1):
        sets = tuple(draw() for _ in range(n))
        hmax = block_max_height(inst, sets)
        if hmax <= bound:
            return FastBlock(sets, hmax, bound, k)
    raise RuntimeError(
        f"no block within height {bound:.4g} after {max_draws} draws "
        f"(observed failure rate 100%); c may be too small or the witness is defective")


class InterleavedStream:
    """Fast and slow schedules interleaved on a single clock.

    ``efficient``: odd days run the greedy potential step, even days the
    round robin; with fewer than 3 elements only the round robin runs.
    ``existential``: days not divisible by 3 replay the randomized block,
    every third day takes the next round-robin set.
    """

    def __init__(self, inst: CbgtInstance, mode: str = "efficient", c: float = DEFAULT_C, seed: int = 0):
        if mode not in ("efficient", "existential"):
            raise ValueError(f"unknown mode {mode!r}")
        self.inst, self.mode = inst, mode
        self.split = speed_split(inst, c)
        self.slow = round_robin_slow(inst)
        self.state = PotentialState.start(self.split)
        self.block = randomized_fast_block(inst, self.split, seed) if mode == "existential" else None
        self.day = 0
        self._slow_i = 0
        self._fast_i = 0

    def _next_slow(self) -> frozenset:
        cut = self.slow.core[self._slow_i % self.slow.period]
        self._slow_i += 1
        return cut

    def _pad(self, cut) -> frozenset:
        # slow elements ride along for free: the potential only sees fast ones
        cut = set(cut)
        for e in sorted(self.split.slow):
            if e not in cut and self.inst.system.can_add(cut, e):
                cut.add(e)
        return frozenset(cut)

    def step(self) -> frozenset:
        self.day += 1
        t = self.day
        if self.mode == "efficient":
            if self.inst.n < 3 or t % 2 == 0:
                cut = self._next_slow()
                _advance(self.inst, self.state, cut)
            else:
                cut = self._pad(greedy_potential_step(self.inst, self.split, self.state))
        else:
            if t % 3:
                cut = self.block.sets[self._fast_i % len(self.block.sets)]
                self._fast_i += 1
            else:
                cut = self._next_slow()
        if not self.inst.system.is_independent(cut):
            raise AssertionError(f"day {t}: emitted cut {sorted(cut)} is dependent")
        return frozenset(cut)

    def __iter__(self) -> Iterator[frozenset]:
        while True:
            yield self.step()


def interleaved_schedule(inst: CbgtInstance, mode: str = "efficient", c: float = DEFAULT_C,
                         seed: int = 0) -> InterleavedStream:
    return InterleavedStream(inst, mode, c, seed)


class ReduceMaxStream:
    """Each day cut the independent set of largest total (post-growth) height."""

    def __init__(self, inst: CbgtInstance):
        self.inst = inst
        self.heights: List[Fraction] = [Fraction(0)] * inst.n
        self.day = 0

    def step(self) -> frozenset:
        g = self.inst.growth
        for e in range(self.inst.n):
            self.heights[e] += g[e]
        cut = self.inst.system.max_weight_independent(self.heights)
        for e in cut:
            self.heights[e] = Fraction(0)
        self.day += 1
        return cut

    def __iter__(self) -> Iterator[frozenset]:
        while True:
            yield self.step()


def reduce_max_greedy(inst: CbgtInstance) -> ReduceMaxStream:
    return ReduceMaxStream(inst)
