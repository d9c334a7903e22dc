"""Fuse-Unfuse tree schedules for uniform and partition matroids."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .model import CbgtInstance, InstanceError, Schedule
from .systems import Partition, Uniform

MAX_MATERIALIZED_PERIOD = 1 << 16


@dataclass(frozen=True)
class FusionTree:
    """A leaf (``element`` set) or an internal node with two children.

    Internal nodes carry ``rate = 2 * max(child rates)`` and a dense ``index``
    used to address their status bit.
    """

    rate: Fraction
    element: Optional[int] = None
    left: Optional["FusionTree"] = None
    right: Optional["FusionTree"] = None
    index: int = -1

    @property
    def is_leaf(self) -> bool:
        return self.element is not None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def leaves(self) -> list:
        if self.is_leaf:
            return [self.element]
        return self.left.leaves() + self.right.leaves()

    def __repr__(self):
        if self.is_leaf:
            return f"Leaf({self.element}, {self.rate})"
        return f"Node({self.rate}, {self.left!r}, {self.right!r})"


def fuse(items: Sequence, k: int, first_index: int = 0) -> list:
    """Fuse ``(element, rate)`` pairs down to ``k`` trees.

    Heap order is (rate, creation sequence); leaves are created in the given
    order, so equal rates resolve by element order.
    """
    items = list(items)
    if not items:
        return []
    k = max(1, min(k, len(items)))
    heap = [(Fraction(rate), seq, FusionTree(Fraction(rate), element=e))
            for seq, (e, rate) in enumerate(items)]
    heapq.heapify(heap)
    seq = len(heap)
    index = first_index
    while len(heap) > k:
        _, _, lo = heapq.heappop(heap)
        _, _, hi = heapq.heappop(heap)
        if lo.rate > hi.rate:
            lo, hi = hi, lo
        node = FusionTree(2 * hi.rate, left=lo, right=hi, index=index)
        index += 1
        heapq.heappush(heap, (node.rate, seq, node))
        seq += 1
    return [entry[2] for entry in sorted(heap, key=lambda h: h[1])]


def _check_roots(trees, items, k):
    total = sum((Fraction(r) for _, r in items), Fraction(0))
    k = max(1, min(k, len(items)))
    scale = max(Fraction(1), total / k)
    for tree in trees:
        if tree.rate >= 2 * scale:
            raise AssertionError(f"fused tree reached rate {tree.rate} >= {2 * scale}")


def _positive_items(inst: CbgtInstance, elements: Sequence[int]):
    return [(e, inst.growth[e]) for e in elements if inst.growth[e] > 0]


def build_forest(inst: CbgtInstance) -> list:
    """The k trees of the preprocessing phase on a ``Uniform(k)`` instance.

    Zero-rate elements are left out; k is clamped to the number of remaining
    elements.
    """
    if not isinstance(inst.system, Uniform):
        raise InstanceError("build_forest needs a uniform matroid")
    items = _positive_items(inst, range(inst.n))
    if not items:
        raise InstanceError("no element with positive rate")
    trees = fuse(items, inst.system.k)
    _check_roots(trees, items, inst.system.k)
    return trees


class FunStream:
    """Playback of a forest: one leaf per tree per day.

    Holds the mutable status bits, so a stream has a single owner.
    """

    def __init__(self, forest: Sequence[FusionTree]):
        self.forest = list(forest)
        internal = 0
        for tree in self.forest:
            stack = [tree]
            while stack:
                v = stack.pop()
                if not v.is_leaf:
                    internal = max(internal, v.index + 1)
                    stack.extend((v.left, v.right))
        self.bits = [0] * internal
        self.day = 0

    @property
    def period(self) -> int:
        return 1 << max((t.depth() for t in self.forest), default=0)

    def step(self) -> frozenset:
        cut = []
        for tree in self.forest:
            v = tree
            while not v.is_leaf:
                self.bits[v.index] ^= 1
                v = v.left if self.bits[v.index] == 0 else v.right
            cut.append(v.element)
        self.day += 1
        return frozenset(cut)

    def __iter__(self) -> Iterator[frozenset]:
        while True:
            yield self.step()

    def periodic_schedule(self, max_period: int = MAX_MATERIALIZED_PERIOD) -> Schedule:
        """One full period from a fresh start, as a periodic :class:`Schedule`."""
        if self.day:
            raise RuntimeError("stream already advanced; build a fresh one")
        P = self.period
        if P > max_period:
            raise ValueError(f"period {P} exceeds the materialization limit {max_period}")
        return Schedule(tuple(self.step() for _ in range(P)), periodic=True)


def fun_step(stream: FunStream) -> frozenset:
    return stream.step()


def fun_stream(inst: CbgtInstance) -> FunStream:
    """Fuse-Unfuse playback for uniform or partition matroids.

    On a partition matroid every block is handled as its own uniform matroid
    and the daily cut is the union of the per-block cuts.
    """
    sys = inst.system
    if isinstance(sys, Uniform):
        return FunStream(build_forest(inst))
    if isinstance(sys, Partition):
        return fun_schedule_partition(inst)
    raise InstanceError(f"Fuse-Unfuse handles uniform and partition matroids, not {sys.tag}")


def fun_schedule_partition(inst: CbgtInstance) -> FunStream:
    sys = inst.system
    if not isinstance(sys, Partition):
        raise InstanceError("expected a partition matroid")
    forest = []
    for block, cap in zip(sys.blocks, sys.caps):
        items = _positive_items(inst, block)
        if not items or cap == 0:
            continue
        trees = fuse(items, cap, first_index=sum(_internal_count(t) for t in forest))
        _check_roots(trees, items, cap)
        forest.extend(trees)
    return FunStream(forest)


def _internal_count(tree: FusionTree) -> int:
    return 0 if tree.is_leaf else 1 + _internal_count(tree.left) + _internal_count(tree.right)


def fun_schedule(inst: CbgtInstance) -> Schedule:
    """The periodic Fuse-Unfuse schedule (one materialised period)."""
    return fun_stream(inst).periodic_schedule()
