"""Combinatorial pinwheel scheduling: every element must be cut at least once
in every window of ``a(e)`` consecutive days."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .lp import Unbounded, maximize
from .model import CbgtInstance, InstanceError, Schedule, TooLargeError, as_fraction
from .systems import (
    Explicit,
    SetSystem,
    Uniform,
    UnsupportedError,
    maximal_independent_sets,
    system_from_json,
)

DEFAULT_STATE_BUDGET = 10**7
MAX_LP_COLUMNS = 1 << 20


@dataclass(frozen=True)
class CpsInstance:
    labels: tuple
    system: SetSystem
    periods: tuple
    certificate: Optional[tuple] = None  # ((frozenset, weight), ...)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "periods", tuple(int(a) for a in self.periods))
        if len(self.labels) != len(self.periods) or self.system.n != len(self.periods):
            raise InstanceError("labels, periods and set system disagree on the ground set size")
        if any(a < 1 for a in self.periods):
            raise InstanceError("periods must be positive integers")
        if self.certificate is not None:
            cert = tuple((frozenset(s), as_fraction(w)) for s, w in self.certificate)
            object.__setattr__(self, "certificate", cert)
            check_certificate(self, cert)

    @property
    def n(self) -> int:
        return len(self.periods)


def check_certificate(cps: CpsInstance, terms) -> Fraction:
    """Verify a fractional cover exactly and return its total weight."""
    cover = [Fraction(0)] * cps.n
    for s, w in terms:
        if w < 0:
            raise InstanceError(f"negative certificate weight {w}")
        if not cps.system.is_independent(s):
            raise InstanceError(f"certificate set {sorted(s)} is not independent")
        for e in s:
            cover[e] += w
    for e, a in enumerate(cps.periods):
        if cover[e] < Fraction(1, a):
            raise InstanceError(f"element {e} covered {cover[e]} < 1/{a}")
    return sum((w for _, w in terms), Fraction(0))


def cps_from_cbgt(inst: CbgtInstance, c) -> CpsInstance:
    """Periods ``floor(c / g(e))``: a schedule meets them iff its height is at most c."""
    c = as_fraction(c)
    if c <= 0:
        raise ValueError("target height must be positive")
    periods = []
    for e, g in enumerate(inst.growth):
        if g <= 0:
            raise InstanceError(f"element {e} has rate 0; strip zero rates first")
        a = math.floor(c / g)
        if a == 0:
            raise InstanceError(f"target height {c} is below the growth rate {g} of element {e}")
        periods.append(a)
    return CpsInstance(inst.labels, inst.system, tuple(periods))


@dataclass(frozen=True)
class PinwheelVerdict:
    ok: bool
    valid: bool
    recurrence: tuple  # cyclic max gap per element (None: never cut)
    violation: Optional[tuple] = None  # (element, first uncovered window start)


def verify_pinwheel(cps: CpsInstance, sched: Schedule) -> PinwheelVerdict:
    """Check every window of ``a(e)`` days of the periodic schedule."""
    if not sched.periodic:
        raise ValueError("pinwheel verification needs a periodic schedule")
    P = sched.period
    valid = all(cps.system.is_independent(c) for c in sched.core)
    gaps = []
    violation = None
    for e, a in enumerate(cps.periods):
        pos = [t for t, cut in enumerate(sched.core, 1) if e in cut]
        if pos:
            cyc = [b - x for x, b in zip(pos, pos[1:])] + [pos[0] + P - pos[-1]]
            gaps.append(max(cyc))
        else:
            gaps.append(None)
        # direct window scan over enough repetitions to see every start in one period
        hit = [False] * (P + a)
        for t in range(1, P + a):
            hit[t] = e in sched.at(t)
        run, miss = 0, None
        for t in range(1, P + a):
            run = 0 if hit[t] else run + 1
            if run >= a:
                miss = t - a + 1
                break
        if miss is not None and violation is None:
            violation = (e, miss)
        if (miss is None) != (gaps[-1] is not None and gaps[-1] <= a):
            raise AssertionError(f"window scan and cyclic gaps disagree for element {e}")
    return PinwheelVerdict(valid and violation is None, valid, tuple(gaps), violation)


def _transitions(system: SetSystem) -> list:
    sets = maximal_independent_sets(system)
    return sorted({frozenset(s) for s in sets}, key=lambda s: (-len(s), sorted(s)))


@dataclass(frozen=True)
class Decision:
    schedulable: bool
    witness: Optional[Schedule]
    states: int


def decide_schedulable(cps: CpsInstance, budget: int = DEFAULT_STATE_BUDGET) -> Decision:
    """Exhaustive search over days-since-last-cut vectors.

    A state records, per element, days since its last cut (at most a(e)-1).
    The instance is schedulable iff a cycle is reachable from the all-zero
    state; the cycle's cuts repeated from day 1 form a valid witness since
    starting lower never hurts.
    """
    space = math.prod(cps.periods)
    if space > budget:
        raise TooLargeError(f"state space too large: {space} states > budget {budget}", partial=space)
    moves = _transitions(cps.system)
    a = cps.periods

    def successors(state):
        for J in moves:
            nxt = tuple(0 if e in J else s + 1 for e, s in enumerate(state))
            if all(s < a[e] for e, s in enumerate(nxt)):
                yield J, nxt

    start = tuple([0] * cps.n)
    colour = {start: 1}  # 1 on stack, 2 finished
    stack = [(start, successors(start))]
    path_moves: list = []
    while stack:
        state, it = stack[-1]
        step = next(it, None)
        if step is None:
            colour[state] = 2
            stack.pop()
            if path_moves:
                path_moves.pop()
            continue
        J, nxt = step
        c = colour.get(nxt)
        if c == 1:
            idx = next(i for i, (s, _) in enumerate(stack) if s == nxt)
            core = tuple(path_moves[idx:]) + (J,)
            witness = Schedule(core, periodic=True)
            if not verify_pinwheel(cps, witness).ok:
                raise AssertionError("search produced a cycle that misses a window")
            return Decision(True, witness, len(colour))
        if c is None:
            colour[nxt] = 1
            stack.append((nxt, successors(nxt)))
            path_moves.append(J)
    return Decision(False, None, len(colour))


@dataclass(frozen=True)
class DensityResult:
    rho: Fraction
    certificate: tuple
    exact: bool  # False: only a supplied certificate was checked


def density(cps: CpsInstance, method: str = "auto") -> DensityResult:
    """Smallest total weight of independent sets covering each e at least 1/a(e)."""
    sys = cps.system
    if method not in ("auto", "lp"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and isinstance(sys, Uniform) and sys.k == 1:
        cert = tuple((frozenset([e]), Fraction(1, a)) for e, a in enumerate(cps.periods))
        return DensityResult(sum(w for _, w in cert), cert, True)
    try:
        if isinstance(sys, Explicit) and len(sys.generators) > MAX_LP_COLUMNS:
            raise UnsupportedError("too many generators")
        columns = _transitions(sys)
    except UnsupportedError:
        if cps.certificate is None:
            raise
        return DensityResult(check_certificate(cps, cps.certificate), cps.certificate, False)
    # dual: max sum y_e / a(e) subject to y(I) <= 1 for every column I
    c = [Fraction(1, a) for a in cps.periods]
    A = [[1 if e in I else 0 for e in range(cps.n)] for I in columns]
    try:
        sol = maximize(c, A, [1] * len(columns))
    except Unbounded:
        raise InstanceError("some element lies in no independent set; no cover exists") from None
    cert = tuple((I, w) for I, w in zip(columns, sol.duals) if w > 0)
    rho = check_certificate(cps, cert)
    if rho != sol.value:
        raise AssertionError(f"primal {rho} and dual {sol.value} optima differ")
    if cps.certificate is not None and rho > check_certificate(cps, cps.certificate):
        raise AssertionError("solver optimum exceeds a supplied certificate")
    return DensityResult(rho, cert, True)


def cbgt_from_half_density(cps: CpsInstance, certificate: Sequence) -> CbgtInstance:
    """Rates ``2/a(e)`` with a witness obtained by doubling a cover of weight
    at most 1/2 and trimming it to generate the rates exactly."""
    rho = check_certificate(cps, certificate)
    if rho > Fraction(1, 2):
        raise InstanceError(f"certificate weight {rho} exceeds 1/2")
    g = [Fraction(2, a) for a in cps.periods]
    terms = [[set(s), 2 * w] for s, w in certificate if w > 0]
    cover = [Fraction(0)] * cps.n
    for s, w in terms:
        for e in s:
            cover[e] += w
    extra: list = []
    for e in range(cps.n):
        excess = cover[e] - g[e]
        for term in terms:
            if excess == 0:
                break
            s, w = term
            if e not in s or w == 0:
                continue
            # move weight delta of this set onto the same set without e
            delta = min(w, excess)
            term[1] = w - delta
            extra.append([s - {e}, delta])
            excess -= delta
        terms.extend(extra)
        extra = []
    merged: dict = {}
    for s, w in terms:
        if w:
            key = frozenset(s)
            merged[key] = merged.get(key, Fraction(0)) + w
    slack = 1 - sum(merged.values())
    if slack:
        merged[frozenset()] = merged.get(frozenset(), Fraction(0)) + slack
    witness = tuple(sorted(merged.items(), key=lambda kv: (sorted(kv[0]), kv[1])))
    return CbgtInstance(cps.labels, cps.system, tuple(g), witness)


def cps_to_json(cps: CpsInstance) -> dict:
    from .model import fraction_to_json

    out = {"elements": list(cps.labels), "system": cps.system.to_json(), "periods": list(cps.periods)}
    if cps.certificate is not None:
        out["certificate"] = [{"set": sorted(s), "weight": fraction_to_json(w)}
                              for s, w in cps.certificate]
    return out


def cps_from_json(obj: dict) -> CpsInstance:
    from .model import fraction_from_json

    try:
        labels = obj["elements"]
        system = system_from_json(obj["system"], n=len(labels))
        periods = obj["periods"]
    except KeyError as exc:
        raise InstanceError(f"pinwheel JSON is missing field {exc}") from None
    cert = None
    if obj.get("certificate") is not None:
        cert = tuple((frozenset(t["set"]), fraction_from_json(t["weight"])) for t in obj["certificate"])
    return CpsInstance(tuple(labels), system, tuple(periods), cert)
