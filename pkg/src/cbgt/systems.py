"""Set systems: explicit independence systems and five matroid families.

Every system works on the dense ground set ``range(n)`` and answers
independence, rank and linear-optimisation queries. Matroids additionally
expose an *exchange oracle* used by :func:`matroid_intersection`.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

from .model import DomainError, InstanceError

ExchangeOracle = Callable[[int], Optional[list]]

FULL_CHECK_LIMIT = 20


class UnsupportedError(ValueError):
    """The requested query is not available for this kind of system."""


class SetSystem:
    """Common interface. Subclasses override whatever they can do faster."""

    tag = ""
    n: int = 0

    @property
    def is_matroid(self) -> bool:
        return True

    def _members(self, X: Iterable[int]) -> frozenset:
        X = frozenset(X)
        for e in X:
            if not isinstance(e, int) or not 0 <= e < self.n:
                raise DomainError(f"element {e!r} is outside the ground set range(0, {self.n})")
        return X

    def is_independent(self, X: Iterable[int]) -> bool:
        raise NotImplementedError

    def can_add(self, I: Iterable[int], x: int) -> bool:
        return self.is_independent(set(I) | {x})

    def rank(self, X: Optional[Iterable[int]] = None) -> int:
        X = range(self.n) if X is None else sorted(self._members(X))
        if not self.is_matroid:
            raise UnsupportedError(f"{self.tag}: rank is only defined here for matroids")
        basis: set = set()
        for x in X:
            if self.can_add(basis, x):
                basis.add(x)
        return len(basis)

    def max_weight_independent(self, w: Sequence) -> frozenset:
        """Independent set maximising total weight (matroid greedy on w > 0)."""
        order = sorted((e for e in range(self.n) if w[e] > 0), key=lambda e: (-w[e], e))
        chosen: set = set()
        for e in order:
            if self.can_add(chosen, e):
                chosen.add(e)
        return frozenset(chosen)

    def exchange_oracle(self, I: Iterable[int]) -> ExchangeOracle:
        """For a fixed independent ``I`` return ``f`` with ``f(x) is None`` when
        ``I + x`` is independent, else the sorted ``y`` in ``I`` such that
        ``I - y + x`` is independent."""
        I = frozenset(I)
        items = sorted(I)

        def f(x: int):
            if self.is_independent(I | {x}):
                return None
            return [y for y in items if self.is_independent((I - {y}) | {x})]

        return f

    def restrict(self, keep: Sequence[int]) -> "SetSystem":
        """Deletion: the system on ``keep`` (old ids), renumbered densely."""
        raise NotImplementedError

    def tight_sets(self) -> list:
        """Family-specific sets whose rank bound is worth checking first."""
        return []

    def to_json(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

class Uniform(SetSystem):
    tag = "uniform"

    def __init__(self, n: int, k: int):
        if n < 0 or k < 0:
            raise InstanceError("uniform matroid needs n >= 0 and k >= 0")
        self.n, self.k = n, k

    def is_independent(self, X) -> bool:
        return len(self._members(X)) <= self.k

    def can_add(self, I, x) -> bool:
        I = set(I)
        return x in I or len(I) < self.k

    def rank(self, X=None) -> int:
        size = self.n if X is None else len(self._members(X))
        return min(size, self.k)

    def exchange_oracle(self, I):
        items = sorted(I)
        full = len(items) >= self.k

        def f(x):
            return list(items) if full else None

        return f

    def restrict(self, keep):
        return Uniform(len(keep), self.k)

    def to_json(self):
        return {"uniform": {"n": self.n, "k": self.k}}

    def __repr__(self):
        return f"Uniform(n={self.n}, k={self.k})"


class Partition(SetSystem):
    tag = "partition"

    def __init__(self, blocks: Sequence[Iterable[int]], caps: Sequence[int]):
        self.blocks = tuple(tuple(sorted(b)) for b in blocks)
        self.caps = tuple(int(c) for c in caps)
        if len(self.blocks) != len(self.caps):
            raise InstanceError("partition needs one cap per block")
        self.n = sum(len(b) for b in self.blocks)
        self.block_of = [-1] * self.n
        for i, b in enumerate(self.blocks):
            for e in b:
                if not 0 <= e < self.n or self.block_of[e] != -1:
                    raise InstanceError("partition blocks must partition range(n)")
                self.block_of[e] = i
        if any(c < 0 for c in self.caps):
            raise InstanceError("partition caps must be nonnegative")

    def _counts(self, X):
        counts = [0] * len(self.blocks)
        for e in X:
            counts[self.block_of[e]] += 1
        return counts

    def is_independent(self, X) -> bool:
        return all(c <= cap for c, cap in zip(self._counts(self._members(X)), self.caps))

    def rank(self, X=None) -> int:
        X = range(self.n) if X is None else self._members(X)
        return sum(min(c, cap) for c, cap in zip(self._counts(X), self.caps))

    def exchange_oracle(self, I):
        items = sorted(I)
        counts = self._counts(items)

        def f(x):
            b = self.block_of[x]
            if counts[b] < self.caps[b]:
                return None
            return [y for y in items if self.block_of[y] == b]

        return f

    def tight_sets(self):
        return [(frozenset(b), cap) for b, cap in zip(self.blocks, self.caps)]

    def restrict(self, keep):
        index = {old: new for new, old in enumerate(keep)}
        blocks, caps = [], []
        for b, cap in zip(self.blocks, self.caps):
            nb = [index[e] for e in b if e in index]
            if nb:
                blocks.append(nb)
                caps.append(cap)
        return Partition(blocks, caps)

    def to_json(self):
        return {"partition": {"blocks": [list(b) for b in self.blocks], "caps": list(self.caps)}}

    def __repr__(self):
        return f"Partition(blocks={self.blocks}, caps={self.caps})"


def _find(parent: dict, v):
    root = v
    while parent.get(root, root) != root:
        root = parent[root]
    while parent.get(v, v) != root:
        parent[v], v = root, parent[v]
    return root


class Graphic(SetSystem):
    """Cycle matroid of a multigraph; element ``e`` is edge ``edges[e]``."""

    tag = "graphic"

    def __init__(self, vertices: int, edges: Sequence[Sequence[int]]):
        self.vertices = int(vertices)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        self.n = len(self.edges)
        for u, v in self.edges:
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise InstanceError(f"edge ({u}, {v}) has an endpoint outside range({self.vertices})")

    def is_independent(self, X) -> bool:
        parent: dict = {}
        for e in self._members(X):
            u, v = self.edges[e]
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def rank(self, X=None) -> int:
        X = range(self.n) if X is None else self._members(X)
        parent: dict = {}
        touched = set()
        for e in X:
            u, v = self.edges[e]
            touched.update((u, v))
            ru, rv = _find(parent, u), _find(parent, v)
            if ru != rv:
                parent[ru] = rv
        components = len({_find(parent, v) for v in touched})
        return len(touched) - components

    def tight_sets(self):
        out = []
        for v in range(self.vertices):
            star = frozenset(e for e, (a, b) in enumerate(self.edges) if v in (a, b))
            if star:
                out.append((star, None))
        return out

    def restrict(self, keep):
        return Graphic(self.vertices, [self.edges[e] for e in keep])

    def to_json(self):
        return {"graphic": {"vertices": self.vertices, "edges": [list(e) for e in self.edges]}}

    def __repr__(self):
        return f"Graphic(vertices={self.vertices}, edges={self.edges})"


class Laminar(SetSystem):
    """``{X : |X & L| <= b(L) for every L}`` over a laminar family."""

    tag = "laminar"

    def __init__(self, n: int, family: Sequence[Iterable[int]], caps: Sequence[int]):
        self.n = int(n)
        if len(family) != len(caps):
            raise InstanceError("laminar family needs one cap per set")
        merged: dict = {}
        for L, cap in zip(family, caps):
            L = frozenset(int(e) for e in L)
            if not L:
                continue
            if any(not 0 <= e < self.n for e in L):
                raise InstanceError(f"laminar set {sorted(L)} leaves range({self.n})")
            if int(cap) < 1:
                raise InstanceError("laminar caps must be positive")
            merged[L] = min(int(cap), merged.get(L, int(cap)))
        items = sorted(merged.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        self.family = tuple(L for L, _ in items)
        self.caps = tuple(c for _, c in items)
        for A, B in itertools.combinations(self.family, 2):
            if A & B and not (A <= B or B <= A):
                raise InstanceError(f"family is not laminar: {sorted(A)} and {sorted(B)} cross")

    def is_independent(self, X) -> bool:
        X = self._members(X)
        return all(len(X & L) <= cap for L, cap in zip(self.family, self.caps))

    def tight_sets(self):
        return list(zip(self.family, self.caps))

    def restrict(self, keep):
        index = {old: new for new, old in enumerate(keep)}
        family, caps = [], []
        for L, cap in zip(self.family, self.caps):
            nl = [index[e] for e in L if e in index]
            if nl:
                family.append(nl)
                caps.append(cap)
        return Laminar(len(keep), family, caps)

    def to_json(self):
        return {"laminar": {"n": self.n, "family": [sorted(L) for L in self.family],
                            "caps": list(self.caps)}}

    def __repr__(self):
        return f"Laminar(n={self.n}, family={[sorted(L) for L in self.family]}, caps={self.caps})"


class Transversal(SetSystem):
    """Matchable left-vertex sets of a bipartite graph; element ``e`` is a left
    vertex adjacent to ``adjacency[e]``."""

    tag = "transversal"

    def __init__(self, adjacency: Sequence[Iterable[int]]):
        self.adjacency = tuple(tuple(sorted(int(r) for r in row)) for row in adjacency)
        self.n = len(self.adjacency)
        self._matched = lru_cache(maxsize=4096)(self._match_size)

    def _match_size(self, X: frozenset) -> int:
        match_right: dict = {}

        def augment(e, seen):
            for r in self.adjacency[e]:
                if r in seen:
                    continue
                seen.add(r)
                if r not in match_right or augment(match_right[r], seen):
                    match_right[r] = e
                    return True
            return False

        return sum(1 for e in sorted(X) if augment(e, set()))

    def is_independent(self, X) -> bool:
        X = self._members(X)
        return self._matched(X) == len(X)

    def rank(self, X=None) -> int:
        X = frozenset(range(self.n)) if X is None else self._members(X)
        return self._matched(X)

    def tight_sets(self):
        rights = sorted({r for row in self.adjacency for r in row})
        out = []
        for r in rights:
            only = frozenset(e for e, row in enumerate(self.adjacency) if row == (r,))
            if only:
                out.append((only, 1))
        return out

    def restrict(self, keep):
        return Transversal([self.adjacency[e] for e in keep])

    def to_json(self):
        return {"transversal": {"adjacency": [list(r) for r in self.adjacency]}}

    def __repr__(self):
        return f"Transversal({self.adjacency})"


class Explicit(SetSystem):
    """Downward closure of a list of generator sets (stored as an antichain)."""

    tag = "explicit"

    def __init__(self, n: int, generators: Sequence[Iterable[int]]):
        self.n = int(n)
        gens = []
        seen = set()
        for G in generators:
            G = frozenset(int(e) for e in G)
            if any(not 0 <= e < self.n for e in G):
                raise InstanceError(f"generator {sorted(G)} leaves range({self.n})")
            if G not in seen:
                seen.add(G)
                gens.append(G)
        if not gens:
            gens = [frozenset()]
        # keep listing order, drop generators dominated by another
        self.generators = tuple(
            G for G in gens if not any(G < H for H in gens)
        )
        self._matroid: Optional[bool] = None

    @property
    def is_matroid(self) -> bool:
        if self._matroid is None:
            self._matroid = self._basis_exchange_holds()
        return self._matroid

    def _basis_exchange_holds(self) -> bool:
        gens = set(self.generators)
        sizes = {len(G) for G in gens}
        if len(sizes) > 1:
            return False
        for B1 in gens:
            for B2 in gens:
                for x in B1 - B2:
                    if not any((B1 - {x}) | {y} in gens for y in B2 - B1):
                        return False
        return True

    def is_independent(self, X) -> bool:
        X = self._members(X)
        return any(X <= G for G in self.generators)

    def rank(self, X=None) -> int:
        X = frozenset(range(self.n)) if X is None else self._members(X)
        return max(len(X & G) for G in self.generators)

    def max_weight_independent(self, w):
        best, best_val = frozenset(), None
        for G in self.generators:
            val = sum(w[e] for e in G if w[e] > 0)
            if best_val is None or val > best_val:
                best_val = val
                best = frozenset(e for e in G if w[e] >= 0)
        return best

    def restrict(self, keep):
        index = {old: new for new, old in enumerate(keep)}
        return Explicit(len(keep), [[index[e] for e in G if e in index] for G in self.generators])

    def to_json(self):
        return {"explicit": {"n": self.n, "generators": [sorted(G) for G in self.generators]}}

    def __repr__(self):
        return f"Explicit(n={self.n}, generators={[sorted(G) for G in self.generators]})"


class DirectSum(SetSystem):
    """Direct sum of systems on disjoint element sets.

    ``elements[p]`` lists the global ids of part ``p`` in its local order;
    by default parts occupy consecutive ranges.
    """

    tag = "direct_sum"

    def __init__(self, parts: Sequence[SetSystem], elements: Optional[Sequence[Sequence[int]]] = None):
        self.parts = tuple(parts)
        if elements is None:
            elements, start = [], 0
            for p in self.parts:
                elements.append(list(range(start, start + p.n)))
                start += p.n
        self.elements = tuple(tuple(int(e) for e in els) for els in elements)
        if len(self.elements) != len(self.parts):
            raise InstanceError("direct sum needs one element list per part")
        self.n = sum(p.n for p in self.parts)
        self.where: list = [None] * self.n
        for pi, (p, els) in enumerate(zip(self.parts, self.elements)):
            if len(els) != p.n:
                raise InstanceError("direct-sum part size does not match its element list")
            for local, e in enumerate(els):
                if not 0 <= e < self.n or self.where[e] is not None:
                    raise InstanceError("direct-sum parts must cover disjoint elements of range(n)")
                self.where[e] = (pi, local)

    @property
    def is_matroid(self) -> bool:
        return all(p.is_matroid for p in self.parts)

    def split(self, X) -> list:
        local = [set() for _ in self.parts]
        for e in X:
            pi, l = self.where[e]
            local[pi].add(l)
        return local

    def is_independent(self, X) -> bool:
        return all(p.is_independent(L) for p, L in zip(self.parts, self.split(self._members(X))))

    def can_add(self, I, x) -> bool:
        pi, l = self.where[x]
        local = {self.where[y][1] for y in I if self.where[y][0] == pi}
        return self.parts[pi].can_add(local, l)

    def rank(self, X=None) -> int:
        X = range(self.n) if X is None else self._members(X)
        return sum(p.rank(L) for p, L in zip(self.parts, self.split(X)))

    def max_weight_independent(self, w):
        out = set()
        for p, els in zip(self.parts, self.elements):
            sub = p.max_weight_independent([w[e] for e in els])
            out.update(els[l] for l in sub)
        return frozenset(out)

    def exchange_oracle(self, I):
        local = self.split(I)
        oracles: dict = {}

        def f(x):
            pi, l = self.where[x]
            if pi not in oracles:
                oracles[pi] = self.parts[pi].exchange_oracle(local[pi])
            res = oracles[pi](l)
            if res is None:
                return None
            els = self.elements[pi]
            return sorted(els[y] for y in res)

        return f

    def tight_sets(self):
        out = []
        for p, els in zip(self.parts, self.elements):
            for S, cap in p.tight_sets():
                out.append((frozenset(els[e] for e in S), cap))
            out.append((frozenset(els), None))
        return out

    def restrict(self, keep):
        index = {old: new for new, old in enumerate(keep)}
        parts, elements = [], []
        for p, els in zip(self.parts, self.elements):
            local_keep = [l for l, e in enumerate(els) if e in index]
            parts.append(p.restrict(local_keep))
            elements.append([index[els[l]] for l in local_keep])
        return DirectSum(parts, elements)

    def to_json(self):
        out = {"parts": [p.to_json() for p in self.parts]}
        default, start = True, 0
        for p, els in zip(self.parts, self.elements):
            if list(els) != list(range(start, start + p.n)):
                default = False
            start += p.n
        if not default:
            out["elements"] = [list(els) for els in self.elements]
        return {"direct_sum": out}

    def __repr__(self):
        return f"DirectSum({list(self.parts)})"


def system_from_json(obj: dict, n: Optional[int] = None) -> SetSystem:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InstanceError(f"system descriptor must be a single-key object, got {obj!r}")
    (tag, body), = obj.items()
    try:
        if tag == "uniform":
            return Uniform(int(body.get("n", n)), int(body["k"]))
        if tag == "partition":
            return Partition(body["blocks"], body["caps"])
        if tag == "graphic":
            return Graphic(body["vertices"], body["edges"])
        if tag == "laminar":
            return Laminar(int(body.get("n", n)), body["family"], body["caps"])
        if tag == "transversal":
            return Transversal(body["adjacency"])
        if tag == "explicit":
            return Explicit(int(body.get("n", n)), body["generators"])
        if tag == "direct_sum":
            parts = [system_from_json(p) for p in body["parts"]]
            return DirectSum(parts, body.get("elements"))
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"bad {tag} descriptor: {exc}") from None
    raise InstanceError(f"unknown system tag {tag!r}")


# ---------------------------------------------------------------------------
# Module-level queries
# ---------------------------------------------------------------------------

def is_independent(sys: SetSystem, X: Iterable[int]) -> bool:
    return sys.is_independent(X)


def rank(sys: SetSystem, X: Optional[Iterable[int]] = None) -> int:
    return sys.rank(X)


def max_weight_independent(sys: SetSystem, w: Sequence) -> frozenset:
    return sys.max_weight_independent(w)


def maximal_independent_sets(sys: SetSystem, limit: int = FULL_CHECK_LIMIT) -> list:
    """Bases of a matroid, or the generators of an explicit system."""
    if isinstance(sys, Explicit):
        return list(sys.generators)
    if sys.n > limit:
        raise UnsupportedError(f"enumerating bases of a {sys.n}-element system exceeds the limit {limit}")
    r = sys.rank()
    return [frozenset(c) for c in itertools.combinations(range(sys.n), r) if sys.is_independent(c)]


@dataclass(frozen=True)
class GrowthVerdict:
    valid: bool
    fully_verified: bool
    violation: Optional[tuple] = None  # (X, sum g(X), rank(X)) or (None, message)

    def __bool__(self):
        return self.valid


def validate_growth(inst) -> GrowthVerdict:
    """Check that ``inst.growth`` lies in the convex hull of independent sets."""
    sys, g = inst.system, inst.growth
    if inst.witness is not None:
        total = sum((w for _, w in inst.witness), Fraction(0))
        if total != 1:
            return GrowthVerdict(False, True, (None, f"witness weights sum to {total}"))
        cover = [Fraction(0)] * inst.n
        for s, w in inst.witness:
            if w < 0:
                return GrowthVerdict(False, True, (None, f"negative weight {w}"))
            if not sys.is_independent(s):
                return GrowthVerdict(False, True, (tuple(sorted(s)), None, None))
            for e in s:
                cover[e] += w
        if tuple(cover) != tuple(g):
            bad = next(e for e in range(inst.n) if cover[e] != g[e])
            return GrowthVerdict(False, True, (None, f"witness gives {cover[bad]} for element {bad}"))
        return GrowthVerdict(True, True)

    if not sys.is_matroid:
        return GrowthVerdict(False, False, (None, "explicit systems need a witness"))

    def check(X):
        X = frozenset(X)
        total = sum((g[e] for e in X), Fraction(0))
        r = sys.rank(X)
        return None if total <= r else (tuple(sorted(X)), total, r)

    if inst.n <= FULL_CHECK_LIMIT:
        for size in range(1, inst.n + 1):
            for X in itertools.combinations(range(inst.n), size):
                bad = check(X)
                if bad:
                    return GrowthVerdict(False, True, bad)
        return GrowthVerdict(True, True)

    battery = [frozenset([e]) for e in range(inst.n)]
    battery += [S for S, _ in sys.tight_sets()]
    battery.append(frozenset(range(inst.n)))
    for X in battery:
        bad = check(X)
        if bad:
            return GrowthVerdict(False, False, bad)
    return GrowthVerdict(True, False)


# ---------------------------------------------------------------------------
# Matroid intersection
# ---------------------------------------------------------------------------

def matroid_intersection(m1: SetSystem, m2: SetSystem, initial: Optional[Iterable[int]] = None) -> frozenset:
    """Maximum-cardinality common independent set of two matroids on range(n).

    Shortest augmenting paths in the exchange graph; neighbours are scanned in
    increasing element id, so the result is deterministic.
    """
    if not (m1.is_matroid and m2.is_matroid):
        raise UnsupportedError("matroid intersection needs two matroids")
    if m1.n != m2.n:
        raise ValueError(f"ground sets differ in size: {m1.n} vs {m2.n}")
    I = set(initial or ())
    if not (m1.is_independent(I) and m2.is_independent(I)):
        raise ValueError("initial set is not common independent")
    for x in range(m1.n):
        if x not in I and m1.can_add(I, x) and m2.can_add(I, x):
            I.add(x)
    while True:
        path = _shortest_augmenting_path(m1, m2, I)
        if path is None:
            return frozenset(I)
        I.symmetric_difference_update(path)


def _shortest_augmenting_path(m1: SetSystem, m2: SetSystem, I: set) -> Optional[list]:
    ex1 = m1.exchange_oracle(I)
    ex2 = m2.exchange_oracle(I)
    sources = []
    into = defaultdict(list)  # y -> [x : I - y + x independent in m1]
    for x in range(m1.n):
        if x in I:
            continue
        ys = ex1(x)
        if ys is None:
            sources.append(x)
        else:
            for y in ys:
                into[y].append(x)

    cache2: dict = {}

    def out2(x):
        if x not in cache2:
            cache2[x] = ex2(x)
        return cache2[x]

    parent: dict = {}
    queue = deque()
    for x in sources:
        parent[x] = None
        if out2(x) is None:
            return [x]
        queue.append(x)

    def trace(v):
        path = []
        while v is not None:
            path.append(v)
            v = parent[v]
        return path[::-1]

    while queue:
        v = queue.popleft()
        if v not in I:
            for y in out2(v):
                if y not in parent:
                    parent[y] = v
                    queue.append(y)
        else:
            for x in into.get(v, ()):
                if x in parent:
                    continue
                parent[x] = v
                if out2(x) is None:
                    return trace(x)
                queue.append(x)
    return None
