"""Instance factories: lower-bound constructions, the tight pair, and seeded
random instances whose growth vector is certified by construction.

Randomness comes from :class:`random.Random` (Mersenne Twister), seeded
explicitly, so a seed pins down an instance on every platform.
"""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Optional

from .model import CbgtInstance, InstanceError
from .systems import (
    Explicit,
    Graphic,
    Laminar,
    Partition,
    SetSystem,
    Transversal,
    Uniform,
    maximal_independent_sets,
)

MAX_BINOMIAL_K = 6
MAX_HYPERCUBE_K = 5
KINDS = ("uniform", "partition", "graphic", "laminar", "transversal", "explicit", "system")


def gen_binomial_lb(k: int) -> CbgtInstance:
    """Elements are the k-subsets of {1..2k}; day-sets are the 2k stars
    ``{S : i in S}``, each with weight 1/(2k), so every rate is 1/2."""
    if not 1 <= k <= MAX_BINOMIAL_K:
        raise ValueError(f"k must lie in [1, {MAX_BINOMIAL_K}]")
    subsets = list(itertools.combinations(range(1, 2 * k + 1), k))
    gens = [frozenset(j for j, S in enumerate(subsets) if i in S) for i in range(1, 2 * k + 1)]
    w = Fraction(1, 2 * k)
    labels = ["{" + ",".join(map(str, S)) + "}" for S in subsets]
    return CbgtInstance(tuple(labels), Explicit(len(subsets), gens),
                        tuple([Fraction(1, 2)] * len(subsets)), tuple((G, w) for G in gens))


def _odd(x: int) -> bool:
    return bin(x).count("1") % 2 == 1


def gen_hypercube_lb(k: int) -> CbgtInstance:
    """Elements are the nonzero vectors of GF(2)^k (element id = vector - 1);
    day-sets are the affine hyperplanes ``{u : v.u = 1}``."""
    if not 1 <= k <= MAX_HYPERCUBE_K:
        raise ValueError(f"k must lie in [1, {MAX_HYPERCUBE_K}]")
    m = 2**k - 1
    gens = [frozenset(u - 1 for u in range(1, m + 1) if _odd(v & u)) for v in range(1, m + 1)]
    labels = [format(v, f"0{k}b") for v in range(1, m + 1)]
    g = Fraction(2 ** (k - 1), m)
    return CbgtInstance(tuple(labels), Explicit(m, gens), tuple([g] * m),
                        tuple((G, Fraction(1, m)) for G in gens))


def gen_tight_pair(eps) -> CbgtInstance:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie strictly between 0 and 1")
    return CbgtInstance(("a", "b"), Uniform(2, 1), (1 - eps, eps),
                        ((frozenset([0]), 1 - eps), (frozenset([1]), eps)))


def uncovered_after_prefix(inst: CbgtInstance, days: int):
    """Exhaust every sequence of ``days`` maximal cuts; return, per sequence,
    an element none of them cut (or None if some sequence covers everything)."""
    moves = maximal_independent_sets(inst.system)
    out = {}
    for seq in itertools.product(range(len(moves)), repeat=days):
        covered = frozenset().union(*(moves[i] for i in seq))
        missing = [e for e in range(inst.n) if e not in covered]
        if not missing:
            return None
        out[seq] = missing[0]
    return out


def hyperplanes_cover(k: int, count: int) -> Optional[tuple]:
    """Some ``count`` hyperplanes covering all nonzero vectors, or None."""
    inst = gen_hypercube_lb(k)
    gens = inst.system.generators
    everything = frozenset(range(inst.n))
    for combo in itertools.combinations(range(len(gens)), count):
        if frozenset().union(*(gens[i] for i in combo)) == everything:
            return combo
    return None


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

def _random_laminar(rng: random.Random, n: int):
    order = list(range(n))
    rng.shuffle(order)
    family = []
    for _ in range(rng.randint(1, max(1, n))):
        a = rng.randrange(n)
        b = rng.randrange(a, n)
        S = frozenset(order[a : b + 1])
        if len(S) < 2 or S in family:
            continue
        if all(S <= T or T <= S or not (S & T) for T in family):
            family.append(S)
    caps = [rng.randint(1, len(S) - 1) for S in family]
    return Laminar(n, [sorted(S) for S in family], caps)


def _random_matroid(rng: random.Random, kind: str, n: int) -> SetSystem:
    if kind == "uniform":
        return Uniform(n, rng.randint(1, max(1, n - 1)))
    if kind == "partition":
        nb = rng.randint(1, min(3, n))
        blocks = [[] for _ in range(nb)]
        for e in range(n):
            blocks[e % nb if e < nb else rng.randrange(nb)].append(e)
        return Partition(blocks, [rng.randint(1, len(b)) for b in blocks])
    if kind == "graphic":
        V = rng.randint(2, max(2, min(6, n + 1)))
        edges = []
        for _ in range(n):
            u, v = rng.sample(range(V), 2)
            edges.append((min(u, v), max(u, v)))
        return Graphic(V, edges)
    if kind == "laminar":
        return _random_laminar(rng, n)
    if kind == "transversal":
        right = rng.randint(2, max(2, min(5, n)))
        return Transversal([rng.sample(range(right), rng.randint(1, right)) for _ in range(n)])
    if kind == "explicit":
        inner = _random_matroid(rng, rng.choice(("uniform", "partition", "graphic", "laminar", "transversal")), n)
        return Explicit(n, maximal_independent_sets(inner))
    if kind == "system":
        gens = []
        for _ in range(rng.randint(2, 5)):
            gens.append(frozenset(e for e in range(n) if rng.random() < 0.6))
        return Explicit(n, [G for G in gens if G] or [frozenset([0])])
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")


def _random_maximal(rng: random.Random, sys: SetSystem) -> frozenset:
    if isinstance(sys, Explicit):
        return rng.choice(sys.generators)
    order = list(range(sys.n))
    rng.shuffle(order)
    chosen: set = set()
    for e in order:
        if sys.can_add(chosen, e):
            chosen.add(e)
    return frozenset(chosen)


def _composition(rng: random.Random, total: int, parts: int) -> list:
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    edges = [0] + cuts + [total]
    return [b - a for a, b in zip(edges, edges[1:])]


def _direct_rates(rng: random.Random, sys: SetSystem, max_den: int) -> tuple:
    """Rates with denominators at most ``max_den`` raised one element at a time
    inside the rank constraints, so the vector is feasible by construction."""
    n = sys.n
    subsets = [frozenset(c) for size in range(1, n + 1) for c in itertools.combinations(range(n), size)]
    ranks = {X: sys.rank(X) for X in subsets}
    g = [Fraction(0)] * n
    order = list(range(n))
    rng.shuffle(order)
    for e in order:
        slack = min(ranks[X] - sum(g[y] for y in X) for X in subsets if e in X)
        q = rng.randint(min(2, max_den), max_den)
        top = math.floor(min(slack, 1) * q)
        if top >= 1:
            # prefer proper fractions so that periods get interesting
            g[e] = Fraction(rng.randint(1, top - 1) if top > 1 and rng.random() < 0.7 else top, q)
    return tuple(g)


def gen_random_normalized(kind: str, n: int, seed: int, max_den: int = 6,
                          witness: bool = True) -> CbgtInstance:
    """A random instance on ``n`` elements.

    With ``witness`` the rates are an integer-weighted average of at most
    ``max_den`` random maximal independent sets (bases, for matroids), so every
    denominator divides the weight total. Without it, rates are drawn directly
    and are only available for matroids.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(f"{kind}:{n}:{seed}:{max_den}:{witness}")
    sys = _random_matroid(rng, kind, n)
    labels = tuple(f"e{e}" for e in range(n))
    if not witness:
        if kind == "system":
            raise InstanceError("non-matroid instances are generated with a witness only")
        return CbgtInstance(labels, sys, _direct_rates(rng, sys, max_den))
    W = rng.randint(min(2, max_den), max_den)
    m = rng.randint(min(2, W), W)
    terms: dict = {}
    for size in _composition(rng, W, m):
        S = _random_maximal(rng, sys)
        terms[S] = terms.get(S, 0) + size
    wit = tuple((S, Fraction(c, W)) for S, c in sorted(terms.items(), key=lambda kv: sorted(kv[0])))
    g = [Fraction(0)] * n
    for S, w in wit:
        for e in S:
            g[e] += w
    return CbgtInstance(labels, sys, tuple(g), wit)


def gen_random_system(n: int, seed: int, generators: int = 3, density: float = 0.7,
                      max_den: int = 6) -> CbgtInstance:
    """Random explicit set system with a witness over its generators.

    Larger ``density`` gives bigger day-sets and therefore faster elements.
    """
    rng = random.Random(f"system:{n}:{seed}:{generators}:{density}:{max_den}")
    gens: list = []
    for _ in range(100 * generators):
        if len(gens) == generators:
            break
        G = frozenset(e for e in range(n) if rng.random() < density)
        if G and all(not (G <= H or H <= G) for H in gens):
            gens.append(G)
    covered = frozenset().union(*gens)
    for e in range(n):
        if e not in covered:
            i = rng.randrange(len(gens))
            gens[i] = gens[i] | {e}
    W = rng.randint(len(gens), max(len(gens), max_den))
    weights = _composition(rng, W, len(gens))
    wit = tuple((G, Fraction(c, W)) for G, c in zip(gens, weights))
    g = [Fraction(0)] * n
    for G, w in wit:
        for e in G:
            g[e] += w
    return CbgtInstance(tuple(f"e{e}" for e in range(n)), Explicit(n, gens), tuple(g), wit)
