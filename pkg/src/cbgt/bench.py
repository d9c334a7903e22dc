"""The acceptance corpus: one check per criterion, each paired with an
independent brute-force or hand-derived oracle where one exists."""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List

from .coloring import ColoredStream, coloring_for
from .exact import cut_windows, exact_schedule, fractional_matching, me_is_independent
from .fun import fun_schedule
from .general import (
    greedy_potential_schedule,
    interleaved_schedule,
    recursion_holds,
)
from .generators import (
    gen_binomial_lb,
    gen_hypercube_lb,
    gen_random_normalized,
    gen_random_system,
    hyperplanes_cover,
    uncovered_after_prefix,
)
from .model import CbgtInstance, Schedule, strip_zero_rate
from .pinwheel import CpsInstance, cbgt_from_half_density, cps_from_cbgt, density, verify_pinwheel
from .simulator import simulate
from .systems import Graphic, Laminar, Uniform, matroid_intersection

MATROID_KINDS = ("uniform", "partition", "graphic", "laminar", "explicit")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass
class Corpus:
    """Schedules produced by criteria 1, 3 and 5, reused by criterion 9."""

    schedules: List[tuple] = field(default_factory=list)  # (instance, periodic schedule)


def example1() -> CbgtInstance:
    rates = [Fraction(1, 10), Fraction(1, 5), Fraction(1, 2), Fraction(1, 2), Fraction(3, 10)]
    return CbgtInstance(tuple("abcde"), Uniform(5, 2), tuple(rates))


def _timed(number: int, name: str, fn: Callable[[], tuple]) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, name, passed, detail, time.perf_counter() - start)


# --- 1 ---------------------------------------------------------------------

def criterion_1(corpus: Corpus) -> tuple:
    start = time.perf_counter()
    inst = example1()
    sched = fun_schedule(inst)
    names = [frozenset(inst.labels[e] for e in c) for c in sched.core]
    expected = [frozenset("bd"), frozenset("ec"), frozenset("ad"), frozenset("ec")]
    rep = simulate(inst, sched, 8)
    elapsed = time.perf_counter() - start
    corpus.schedules.append((inst, sched))
    ok = names == expected and rep.valid and rep.max_height == 1 and elapsed < 1
    return ok, f"trace={[''.join(sorted(c)) for c in names]} h={rep.max_height} in {elapsed:.3f}s"


# --- 2 ---------------------------------------------------------------------

FIG1 = [(1, 3), (3, 6), (6, 9), (9, 11), (12, 14), (14, 17), (17, 20), (20, 22)]


def criterion_2(corpus: Corpus) -> tuple:
    got = [tuple(w) for w in cut_windows(Fraction(4, 11), 22)]
    return got == FIG1, f"windows={got}"


# --- 3 ---------------------------------------------------------------------

def criterion_3(corpus: Corpus, per_family: int = 100) -> tuple:
    start = time.perf_counter()
    failures = []
    done = 0
    for kind in MATROID_KINDS:
        for i in range(per_family):
            n = 2 + i % 7
            inst = gen_random_normalized(kind, n, seed=i, max_den=6, witness=(i % 2 == 0))
            try:
                res = exact_schedule(inst, max_product=10**5)
            except Exception as exc:  # recorded, never swallowed silently
                failures.append(f"{kind}#{i}: {exc}")
                continue
            T = res.period
            full = simulate(res.normalized, _restricted(inst, res.schedule), 3 * T)
            orig = simulate(inst, res.schedule, 3 * T)
            if not (full.exact and full.valid and full.max_discrepancy < 1 and full.max_height < 2
                    and orig.valid and orig.max_height < 2):
                failures.append(f"{kind}#{i}: d={full.max_discrepancy} h={orig.max_height}")
            corpus.schedules.append((inst, res.schedule))
            done += 1
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    detail = f"{done} instances, {len(failures)} failures, {elapsed:.1f}s"
    if failures:
        detail += f"; first: {failures[0]}"
    return ok, detail


def _restricted(inst: CbgtInstance, sched: Schedule) -> Schedule:
    """Renumber a schedule onto the positive-rate elements of ``inst``."""
    keep = [e for e, g in enumerate(inst.growth) if g > 0]
    index = {e: i for i, e in enumerate(keep)}
    return Schedule(tuple(frozenset(index[e] for e in c if e in index) for c in sched.core), sched.periodic)


# --- 4 ---------------------------------------------------------------------

def criterion_4(corpus: Corpus, trials: int = 1000) -> tuple:
    rng = random.Random(4)
    bad = 0
    for _ in range(trials):
        q = rng.randint(1, 24)
        g = Fraction(rng.randint(1, q), q)
        T = g.denominator * rng.randint(1, 4)
        x = fractional_matching(g, T)
        per_time = {t: Fraction(0) for t in range(1, T + 1)}
        per_window: dict = {}
        for (i, t), v in x.items():
            per_time[t] += v
            per_window[i] = per_window.get(i, Fraction(0)) + v
        if any(v != g for v in per_time.values()) or len(per_window) != T * g \
                or any(v != 1 for v in per_window.values()) or any(v < 0 for v in x.values()):
            bad += 1
    return bad == 0, f"{trials} (g, T) pairs, {bad} violations"


# --- 5 ---------------------------------------------------------------------

def criterion_5(corpus: Corpus, per_family: int = 200) -> tuple:
    bad = []
    for kind in ("graphic", "laminar"):
        for i in range(per_family):
            n = 1 + i % 10 if kind == "laminar" else 1 + i % 8
            inst = gen_random_normalized(kind, n, seed=1000 + i, max_den=6)
            col = coloring_for(inst)
            if kind == "graphic":
                cap = 2 - Fraction(2, inst.system.vertices)
            else:
                cap = Fraction(2)
            if any(v > cap for v in col.class_growth.values()):
                bad.append(f"{kind}#{i}: class over {cap}")
                continue
            if not any(g > 0 for g in inst.growth):
                continue
            stream = ColoredStream(inst, col)
            sched = stream.periodic_schedule()
            rep = simulate(inst, sched, 4 * sched.period)
            if not (rep.valid and rep.max_height < 4):
                bad.append(f"{kind}#{i}: h={rep.max_height} valid={rep.valid}")
            corpus.schedules.append((inst, sched))
    return not bad, f"{2 * per_family} instances, {len(bad)} failures" + (f"; first: {bad[0]}" if bad else "")


# --- 6 ---------------------------------------------------------------------

def criterion_6(corpus: Corpus) -> tuple:
    start = time.perf_counter()
    notes = []
    ok = True
    for k in (2, 3):
        inst = gen_binomial_lb(k)
        missing = uncovered_after_prefix(inst, k)
        lower = Fraction(k, 2)
        target = math.log2(inst.n) / 4
        good = missing is not None and lower > target
        ok &= good
        notes.append(f"binomial k={k}: every {k}-prefix misses an element, h>={lower}>{target:.3f}")
    for k in (1, 2, 3, 4):
        cover = hyperplanes_cover(k, k - 1)
        ok &= cover is None
        notes.append(f"hypercube k={k}: {'no' if cover is None else 'a'} cover by {k - 1}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    return ok, "; ".join(notes) + f" ({elapsed:.1f}s)"


# --- 7 ---------------------------------------------------------------------

def potential_corpus(count: int = 50) -> list:
    out = [gen_binomial_lb(2), gen_binomial_lb(3), gen_binomial_lb(4)]
    seed = 0
    while len(out) < count:
        n = 10 + seed % 31
        out.append(gen_random_system(n, seed, generators=2 + seed % 4, density=0.75))
        seed += 1
    return out


def criterion_7(corpus: Corpus, count: int = 50, c: float = 2.5) -> tuple:
    bad = []
    with_fast = 0
    for idx, inst in enumerate(potential_corpus(count)):
        n = inst.n
        sched, state, split = greedy_potential_schedule(inst, c)
        with_fast += bool(split.fast)
        bound = 4 * math.log(n)
        # the greedy's own heights after every step
        heights = []
        h = {e: Fraction(0) for e in split.fast}
        for cut in sched.core:
            h = {e: inst.growth[e] if e in cut else h[e] + inst.growth[e] for e in h}
            heights.extend(h.values())
        # wall-clock heights from the simulator over the same n days
        rep = simulate(inst, sched, n)
        wall = [rep.per_element[e].max_height for e in split.fast]
        if any(x > bound for x in heights + wall):
            bad.append(f"#{idx}: height above 4 ln n = {bound:.3f}")
        for before, after, _ in state.history:
            if not recursion_holds(split, n, before, after):
                bad.append(f"#{idx}: potential recursion fails ({after} vs {before})")
                break
    ok = not bad and with_fast > 0
    return ok, f"{count} instances ({with_fast} with fast elements, c={c}), {len(bad)} failures" + (
        f"; first: {bad[0]}" if bad else "")


# --- 8 ---------------------------------------------------------------------

def criterion_8(corpus: Corpus, systems: int = 10) -> tuple:
    instances = [gen_binomial_lb(2), gen_binomial_lb(3)]
    instances += [gen_random_system(10 + 2 * s, 500 + s, generators=3, density=0.6) for s in range(systems)]
    worst = []
    bad = []
    for idx, inst in enumerate(instances):
        n = inst.n
        rep = simulate(inst, interleaved_schedule(inst, "efficient"), 20 * n)
        bound = 8 * math.log(n)
        worst.append(float(rep.max_height) / bound)
        if not (rep.valid and rep.max_height <= bound):
            bad.append(f"#{idx} n={n}: h={float(rep.max_height):.3f} > {bound:.3f}")
    return not bad, f"{len(instances)} instances, worst h/(8 ln n) = {max(worst):.3f}" + (
        f"; first failure: {bad[0]}" if bad else "")


# --- 9 ---------------------------------------------------------------------

def criterion_9(corpus: Corpus) -> tuple:
    checked, bad = 0, []
    for inst, sched in corpus.schedules:
        stripped, _ = strip_zero_rate(inst)
        if stripped.n == 0:
            continue
        local = _restricted(inst, sched)
        h = simulate(stripped, local, 2 * local.period).max_height
        for c in (2, 4):
            verdict = verify_pinwheel(cps_from_cbgt(stripped, c), local)
            checked += 1
            if verdict.ok != (h <= c):
                bad.append(f"c={c}: pinwheel {verdict.ok}, h={h}")
    return checked > 0 and not bad, f"{checked} (schedule, c) pairs, {len(bad)} disagreements"


# --- 10 --------------------------------------------------------------------

def half_density_cps(kind: str, n: int, seed: int) -> CpsInstance:
    """Periods ceil(2/g) from a random all-bases witness scaled to weight 1/2."""
    base = gen_random_normalized(kind, n, seed=seed, max_den=6)
    base, _ = strip_zero_rate(base)
    cert = tuple((s, w / 2) for s, w in base.witness if s)
    periods = [math.ceil(2 / g) for g in base.growth]
    return CpsInstance(base.labels, base.system, tuple(periods), cert)


def criterion_10(corpus: Corpus, count: int = 20) -> tuple:
    bad = []
    made = 0
    seed = 0
    while made < count:
        kind = MATROID_KINDS[seed % len(MATROID_KINDS)]
        cps = half_density_cps(kind, 3 + seed % 6, seed=7000 + seed)
        seed += 1
        if cps.n == 0:
            continue
        made += 1
        rho = density(cps).rho
        inst = cbgt_from_half_density(cps, cps.certificate)
        res = exact_schedule(inst)
        verdict = verify_pinwheel(cps, res.schedule)
        if rho > Fraction(1, 2) or not verdict.ok:
            bad.append(f"{kind}: rho={rho} ok={verdict.ok}")
    rng = random.Random(10)
    lp_bad = 0
    for _ in range(20):
        periods = [rng.randint(1, 12) for _ in range(rng.randint(1, 6))]
        cps = CpsInstance(tuple(map(str, range(len(periods)))), Uniform(len(periods), 1), tuple(periods))
        if density(cps, method="lp").rho != sum(Fraction(1, a) for a in periods):
            lp_bad += 1
    ok = not bad and lp_bad == 0
    return ok, f"{count} half-density instances scheduled ({len(bad)} failures); 1-uniform LP mismatches: {lp_bad}"


# --- 11 --------------------------------------------------------------------

def brute_matchable(windows, times) -> bool:
    """General bipartite matching (augmenting paths), ignoring the staircase order."""
    owner: dict = {}

    def augment(t, seen):
        for i, w in enumerate(windows):
            if w.lo <= t <= w.hi and i not in seen:
                seen.add(i)
                if i not in owner or augment(owner[i], seen):
                    owner[i] = t
                    return True
        return False

    return all(augment(t, set()) for t in times)


def brute_max_common(m1, m2) -> int:
    for size in range(m1.n, -1, -1):
        for X in itertools.combinations(range(m1.n), size):
            if m1.is_independent(X) and m2.is_independent(X):
                return size
    return 0


def brute_max_weight(sys, w) -> int:
    best = 0
    for size in range(sys.n + 1):
        for X in itertools.combinations(range(sys.n), size):
            if sys.is_independent(X):
                best = max(best, sum(w[e] for e in X))
    return best


def criterion_11(corpus: Corpus, pairs: int = 60, weights: int = 40) -> tuple:
    mismatch = []
    for T in range(1, 9):
        for p in range(1, T + 1):
            g = Fraction(p, T)
            W = cut_windows(g, T)
            for size in range(T + 1):
                for S in itertools.combinations(range(1, T + 1), size):
                    if me_is_independent(W, S) != brute_matchable(W, S):
                        mismatch.append(f"windows g={g} T={T} S={S}")
    rng = random.Random(11)
    for i in range(pairs):
        n = rng.randint(1, 10)
        k1, k2 = rng.choice(MATROID_KINDS), rng.choice(MATROID_KINDS)
        m1 = gen_random_normalized(k1, n, seed=2 * i).system
        m2 = gen_random_normalized(k2, n, seed=2 * i + 1).system
        got = matroid_intersection(m1, m2)
        if not (m1.is_independent(got) and m2.is_independent(got)) or len(got) != brute_max_common(m1, m2):
            mismatch.append(f"intersection {k1}x{k2} n={n}")
    for i in range(weights):
        n = rng.randint(1, 12)
        kind = rng.choice(MATROID_KINDS + ("transversal", "system"))
        sys = gen_random_normalized(kind, n, seed=3000 + i).system
        w = [rng.randint(-3, 9) for _ in range(n)]
        got = sys.max_weight_independent(w)
        if not sys.is_independent(got) or sum(w[e] for e in got) != brute_max_weight(sys, w):
            mismatch.append(f"max-weight {kind} n={n}")
    return not mismatch, f"{len(mismatch)} mismatches" + (f"; first: {mismatch[0]}" if mismatch else "")


# ---------------------------------------------------------------------------

NAMES = {
    1: "example trace",
    2: "cut windows",
    3: "height below 2 on matroids",
    4: "fractional matching identity",
    5: "coloring caps and height below 4",
    6: "executable lower bounds",
    7: "greedy potential bound",
    8: "interleaved logarithmic height",
    9: "pinwheel equivalence",
    10: "density one half corollary",
    11: "oracle equivalences",
}


def run_all(quick: bool = False) -> list:
    corpus = Corpus()
    scale = {3: {"per_family": 10}, 4: {"trials": 100}, 5: {"per_family": 20}, 7: {"count": 10},
             8: {"systems": 3}, 10: {"count": 5}, 11: {"pairs": 10, "weights": 10}} if quick else {}
    runners = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
               6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
               11: criterion_11}
    results = []
    for k in sorted(runners):
        kwargs = scale.get(k, {})
        results.append(_timed(k, f"{k}. {NAMES[k]}", lambda k=k, kw=kwargs: runners[k](corpus, **kw)))
    return results
