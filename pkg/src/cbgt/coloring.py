"""Rainbow-circuit-free colorings of graphic and laminar matroids, and the
composed schedule that runs one Fuse-Unfuse stream per color class."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .fun import FunStream, fuse
from .model import CbgtInstance, InstanceError, Schedule
from .systems import Graphic, Laminar


@dataclass(frozen=True)
class Coloring:
    """``color[e]`` is the class of element e, or None for zero-rate elements
    (those are never scheduled and need no color)."""

    color: tuple
    class_growth: dict
    # graphic only: eliminated vertex for each color, in elimination order
    order: tuple = field(default=())

    def classes(self) -> dict:
        out: dict = {}
        for e, c in enumerate(self.color):
            if c is not None:
                out.setdefault(c, []).append(e)
        return out


def _class_growth(inst: CbgtInstance, color) -> dict:
    growth: dict = {}
    for e, c in enumerate(color):
        if c is not None:
            growth[c] = growth.get(c, Fraction(0)) + inst.growth[e]
    return growth


def graphic_coloring(inst: CbgtInstance) -> Coloring:
    """Vertex elimination: repeatedly remove the vertex of least incident
    growth and give its remaining edges a fresh color (ties by vertex id)."""
    sys = inst.system
    if not isinstance(sys, Graphic):
        raise InstanceError("graphic_coloring needs a graphic matroid")
    g = inst.growth
    remaining = set(range(sys.vertices))
    uncolored = {e for e in range(sys.n) if g[e] > 0}
    color: list = [None] * sys.n
    order = []
    for i in range(sys.vertices - 1, 0, -1):
        load = {v: Fraction(0) for v in remaining}
        for e in uncolored:
            u, v = sys.edges[e]
            load[u] += g[e]
            if v != u:
                load[v] += g[e]
        v_i = min(remaining, key=lambda v: (load[v], v))
        star = [e for e in uncolored if v_i in sys.edges[e]]
        for e in star:
            color[e] = i
        uncolored.difference_update(star)
        remaining.discard(v_i)
        order.append((i, v_i))
    if uncolored:
        # only loops at the last vertex can remain, and loops have rank 0
        raise InstanceError(f"edges {sorted(uncolored)} are loops with positive rate")
    growth = _class_growth(inst, color)
    return Coloring(tuple(color), growth, tuple((i, v) for i, v in order if i in growth))


def laminar_coloring(inst: CbgtInstance) -> Coloring:
    """Set-fuse the two cheapest members of each over-full minimal set until
    every set L holds at most b(L) fused elements, then color per fused element."""
    sys = inst.system
    if not isinstance(sys, Laminar):
        raise InstanceError("laminar_coloring needs a laminar matroid")
    g = inst.growth
    positive = [e for e in range(sys.n) if g[e] > 0]
    members = {e: frozenset([e]) for e in positive}
    rate = {e: g[e] for e in positive}
    next_id = sys.n
    sets = []
    for L, cap in zip(sys.family, sys.caps):
        cur = {e for e in L if g[e] > 0}
        if cur:
            sets.append([len(L), sorted(L), cur, cap])
    # family is sorted by size, so the first remaining set is inclusion-minimal
    sets.sort(key=lambda s: (s[0], s[1]))
    while sets:
        _, _, cur, cap = sets.pop(0)
        while len(cur) > cap:
            s1, s2 = sorted(cur, key=lambda s: (rate[s], s))[:2]
            fused = next_id
            next_id += 1
            members[fused] = members.pop(s1) | members.pop(s2)
            rate[fused] = rate.pop(s1) + rate.pop(s2)
            if rate[fused] >= 2:
                raise AssertionError(f"set-fusion reached rate {rate[fused]}")
            for X in [cur] + [s[2] for s in sets]:
                if s1 in X and s2 in X:
                    X.difference_update((s1, s2))
                    X.add(fused)
    color: list = [None] * sys.n
    finals = sorted(members.values(), key=min)
    for c, group in enumerate(finals, 1):
        for e in group:
            color[e] = c
    return Coloring(tuple(color), _class_growth(inst, color))


def coloring_for(inst: CbgtInstance) -> Coloring:
    if isinstance(inst.system, Graphic):
        return graphic_coloring(inst)
    if isinstance(inst.system, Laminar):
        return laminar_coloring(inst)
    raise InstanceError(f"no rainbow-circuit-free coloring for {inst.system.tag}")


class ColoredStream:
    """One 1-uniform Fuse-Unfuse stream per color class, run in parallel.

    Every emitted cut is checked against the independence oracle.
    """

    def __init__(self, inst: CbgtInstance, coloring: Coloring):
        for c, total in coloring.class_growth.items():
            if total > 2:
                raise ValueError(f"color class {c} has growth {total} > 2")
        forest = []
        for c, elements in sorted(coloring.classes().items()):
            items = [(e, inst.growth[e]) for e in elements if inst.growth[e] > 0]
            if items:
                offset = sum(_internal(t) for t in forest)
                forest.extend(fuse(items, 1, first_index=offset))
        self.inst = inst
        self.coloring = coloring
        self.fun = FunStream(forest)

    @property
    def period(self) -> int:
        return self.fun.period

    def step(self) -> frozenset:
        cut = self.fun.step()
        if not self.inst.system.is_independent(cut):
            raise AssertionError(f"day {self.fun.day}: rainbow cut {sorted(cut)} is dependent")
        return cut

    def __iter__(self) -> Iterator[frozenset]:
        while True:
            yield self.step()

    def periodic_schedule(self) -> Schedule:
        if self.fun.day:
            raise RuntimeError("stream already advanced; build a fresh one")
        return Schedule(tuple(self.step() for _ in range(self.period)), periodic=True)


def _internal(tree) -> int:
    return 0 if tree.is_leaf else 1 + _internal(tree.left) + _internal(tree.right)


def colored_schedule(inst: CbgtInstance, coloring: Optional[Coloring] = None) -> ColoredStream:
    return ColoredStream(inst, coloring if coloring is not None else coloring_for(inst))
