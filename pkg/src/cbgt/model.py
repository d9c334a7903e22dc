"""Exact-arithmetic domain types shared by the schedulers and the simulator.

Rates are :class:`fractions.Fraction` everywhere; an element is identified by
its dense index in ``range(n)`` and that index is the global tie-breaking order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterable, Iterator, Optional, Sequence

Rational = Fraction
CutSet = frozenset  # frozenset[int]
Witness = tuple  # tuple[tuple[frozenset[int], Fraction], ...]

DEFAULT_PRODUCT_BUDGET = 10**6


class InstanceError(ValueError):
    """Malformed or inconsistent instance data."""


class DomainError(ValueError):
    """An element id outside the ground set was used."""


class TooLargeError(ValueError):
    """A pseudo-polynomial quantity exceeded its configured budget."""

    def __init__(self, message: str, partial: Optional[int] = None):
        super().__init__(message)
        self.partial = partial


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are accepted only through their shortest decimal repr
        return Fraction(repr(value))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    return Fraction(value)


@dataclass(frozen=True)
class CbgtInstance:
    """A combinatorial bamboo-garden-trimming instance (E, I, g).

    ``witness`` is an optional convex combination of independent sets that
    generates ``growth`` exactly.
    """

    labels: tuple
    system: object  # cbgt.systems.SetSystem
    growth: tuple
    witness: Optional[Witness] = None

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        growth = tuple(as_fraction(g) for g in self.growth)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "growth", growth)
        if len(labels) != len(growth):
            raise InstanceError(f"{len(labels)} labels but {len(growth)} rates")
        if self.system.n != len(growth):
            raise InstanceError(
                f"set system has {self.system.n} elements, instance has {len(growth)}")
        for e, g in enumerate(growth):
            if not 0 <= g <= 1:
                raise InstanceError(f"rate of element {e} is {g}, outside [0, 1]")
        if self.witness is not None:
            terms = tuple((frozenset(s), as_fraction(w)) for s, w in self.witness)
            object.__setattr__(self, "witness", terms)
            for s, w in terms:
                if w < 0:
                    raise InstanceError(f"negative witness weight {w}")
                if any(not 0 <= e < len(growth) for e in s):
                    raise InstanceError(f"witness set {sorted(s)} leaves the ground set")
            if sum(w for _, w in terms) != 1:
                raise InstanceError("witness weights do not sum to 1")
            if witness_growth(terms, len(growth)) != growth:
                raise InstanceError("witness does not generate the growth vector")

    @property
    def n(self) -> int:
        return len(self.growth)

    def label(self, e: int) -> str:
        return self.labels[e]


def witness_growth(terms: Iterable, n: int) -> tuple:
    g = [Fraction(0)] * n
    for s, w in terms:
        for e in s:
            g[e] += w
    return tuple(g)


@dataclass(frozen=True)
class Schedule:
    """A finite schedule, or the infinite repetition of ``core`` when periodic."""

    core: tuple
    periodic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "core", tuple(frozenset(c) for c in self.core))
        if self.periodic and not self.core:
            raise ValueError("a periodic schedule needs a nonempty core")

    def __len__(self) -> int:
        return len(self.core)

    @property
    def period(self) -> int:
        return len(self.core)

    def at(self, t: int) -> frozenset:
        """Cut set of day ``t`` (1-based)."""
        if t < 1:
            raise IndexError(t)
        if self.periodic:
            return self.core[(t - 1) % len(self.core)]
        return self.core[t - 1]

    def stream(self) -> Iterator[frozenset]:
        if not self.periodic:
            yield from self.core
            return
        while True:
            yield from self.core

    def prefix(self, days: int) -> "Schedule":
        return Schedule(tuple(islice(self.stream(), days)), periodic=False)

    def check_ground(self, n: int) -> None:
        for t, cut in enumerate(self.core, 1):
            for e in cut:
                if not 0 <= e < n:
                    raise DomainError(f"day {t} cuts element {e} outside ground set of size {n}")


def lcm_of_denominators(growth: Sequence[Fraction], max_T: Optional[int] = None):
    """Return ``(T, counts)`` with T the lcm of the rate denominators and
    ``counts[e] = T * g(e)``.

    Zero rates must be stripped beforehand.
    """
    T = 1
    for e, g in enumerate(growth):
        g = as_fraction(g)
        if g == 0:
            raise InstanceError(f"element {e} has zero rate; strip it first")
        T = math.lcm(T, g.denominator)
        if max_T is not None and T > max_T:
            raise TooLargeError(f"T too large: lcm exceeds {max_T} at element {e}", partial=T)
    counts = tuple(int(T * as_fraction(g)) for g in growth)
    return T, counts


def strip_zero_rate(inst: CbgtInstance):
    """Delete zero-rate elements. Returns ``(instance, removed_ids)``.

    Surviving elements are renumbered densely in their original order.
    """
    keep = [e for e, g in enumerate(inst.growth) if g > 0]
    removed = [e for e, g in enumerate(inst.growth) if g == 0]
    if not removed:
        return inst, []
    index = {old: new for new, old in enumerate(keep)}
    witness = None
    if inst.witness is not None:
        merged: dict = {}
        for s, w in inst.witness:
            t = frozenset(index[e] for e in s if e in index)
            merged[t] = merged.get(t, Fraction(0)) + w
        witness = tuple(sorted(merged.items(), key=lambda kv: (sorted(kv[0]), kv[1])))
    return (
        CbgtInstance(
            labels=tuple(inst.labels[e] for e in keep),
            system=inst.system.restrict(keep),
            growth=tuple(inst.growth[e] for e in keep),
            witness=witness,
        ),
        removed,
    )


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def fraction_to_json(q: Fraction) -> list:
    return [str(q.numerator), str(q.denominator)]


def fraction_from_json(obj) -> Fraction:
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise InstanceError(f"rational must be a [num, den] pair, got {obj!r}")
        return Fraction(int(obj[0]), int(obj[1]))
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, int):
        return Fraction(obj)
    raise InstanceError(f"cannot read rational from {obj!r}")


def instance_to_json(inst: CbgtInstance) -> dict:
    out = {
        "elements": list(inst.labels),
        "system": inst.system.to_json(),
        "growth": [fraction_to_json(g) for g in inst.growth],
    }
    if inst.witness is not None:
        out["witness"] = [
            {"set": sorted(s), "weight": fraction_to_json(w)} for s, w in inst.witness
        ]
    return out


def instance_from_json(obj: dict) -> CbgtInstance:
    from .systems import system_from_json

    try:
        labels = obj["elements"]
        growth = [fraction_from_json(g) for g in obj["growth"]]
        system = system_from_json(obj["system"], n=len(labels))
    except KeyError as exc:
        raise InstanceError(f"instance JSON is missing field {exc}") from None
    witness = None
    if obj.get("witness") is not None:
        witness = tuple(
            (frozenset(int(e) for e in term["set"]), fraction_from_json(term["weight"]))
            for term in obj["witness"]
        )
    return CbgtInstance(labels=tuple(labels), system=system, growth=tuple(growth), witness=witness)


def schedule_to_json(sched: Schedule) -> dict:
    return {"periodic": sched.periodic, "core": [sorted(c) for c in sched.core]}


def schedule_from_json(obj: dict) -> Schedule:
    try:
        return Schedule(tuple(frozenset(int(e) for e in c) for c in obj["core"]),
                        periodic=bool(obj.get("periodic", False)))
    except KeyError as exc:
        raise InstanceError(f"schedule JSON is missing field {exc}") from None
