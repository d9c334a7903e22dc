"""Exact replay of schedules: heights, recurrence times, discrepancy, validity.

Heights follow grow-then-cut: ``h_t(e)`` is measured after day ``t``'s growth
and before the cut of ``pi(t)``. A recurrence time is the largest distance
between consecutive cuts of an element, with an implicit cut at day 0, so
``h(e) = gamma(e) * g(e)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterable, Optional, Sequence, Union

from .model import CbgtInstance, DomainError, Schedule, fraction_to_json

INF = math.inf
Number = Union[Fraction, float]


@dataclass(frozen=True)
class ElementStats:
    max_height: Number
    recurrence: Optional[int]  # None: never cut again
    discrepancy: Number
    counts: dict = field(default_factory=dict)  # t -> A(pi, e, t)


@dataclass(frozen=True)
class SimulationReport:
    horizon: int
    valid: bool
    first_invalid: Optional[int]
    max_height: Number
    max_discrepancy: Number
    per_element: tuple
    exact: bool  # values describe the whole infinite schedule, not just the horizon
    trajectory_max_height: Fraction = Fraction(0)

    @property
    def heights(self) -> tuple:
        return tuple(s.max_height for s in self.per_element)

    @property
    def discrepancies(self) -> tuple:
        return tuple(s.discrepancy for s in self.per_element)


def _as_stream(sched):
    if isinstance(sched, Schedule):
        return sched.stream()
    return iter(sched)


def simulate(inst: CbgtInstance, sched, horizon: int, samples: Iterable[int] = ()) -> SimulationReport:
    """Replay ``sched`` for ``horizon`` days.

    ``sched`` is a :class:`Schedule` or any iterable of cut sets. For periodic
    schedules the reported h, gamma and d are exact for the infinite
    repetition; otherwise they are truncated at the horizon and ``exact`` is
    False.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    n, g = inst.n, inst.growth
    samples = sorted(set(samples))
    if any(not 1 <= t <= horizon for t in samples):
        raise ValueError("sample times must lie in [1, horizon]")
    wanted = set(samples)
    oracle: dict = {}

    def independent(cut):
        if cut not in oracle:
            oracle[cut] = inst.system.is_independent(cut)
        return oracle[cut]

    height = [Fraction(0)] * n
    last = [0] * n
    count = [0] * n
    max_h = [Fraction(0)] * n
    max_gap = [0] * n
    max_d = [Fraction(0)] * n
    sampled = [dict() for _ in range(n)]
    first_invalid = None

    stream = _as_stream(sched)
    t = 0
    for t, cut in enumerate(islice(stream, horizon), 1):
        cut = frozenset(cut)
        for e in cut:
            if not (isinstance(e, int) and 0 <= e < n):
                raise DomainError(f"day {t} cuts element {e!r} outside range({n})")
        if first_invalid is None and not independent(cut):
            first_invalid = t
        for e in range(n):
            height[e] += g[e]
            if height[e] != (t - last[e]) * g[e]:
                raise AssertionError(f"height bookkeeping diverged for element {e} on day {t}")
            if height[e] > max_h[e]:
                max_h[e] = height[e]
            if t - last[e] > max_gap[e]:
                max_gap[e] = t - last[e]
            if e in cut:
                height[e] = Fraction(0)
                last[e] = t
                count[e] += 1
            dev = abs(t * g[e] - count[e])
            balanced = math.floor(t * g[e]) <= count[e] <= math.ceil(t * g[e])
            if (dev < 1) != balanced:
                raise AssertionError(f"discrepancy characterisation failed for element {e} on day {t}")
            if dev > max_d[e]:
                max_d[e] = dev
            if t in wanted:
                sampled[e][t] = count[e]
    if t < horizon:
        horizon = t  # finite schedule ran out
    trajectory_max = max(max_h, default=Fraction(0))

    if isinstance(sched, Schedule) and sched.periodic:
        stats, valid, first_bad = _periodic_exact(inst, sched, independent)
        stats = tuple(
            ElementStats(s.max_height, s.recurrence, s.discrepancy, sampled[e])
            for e, s in enumerate(stats)
        )
        if horizon >= 2 * sched.period:
            for e, s in enumerate(stats):
                if s.recurrence is not None and max_h[e] != s.max_height:
                    raise AssertionError(f"replayed height of element {e} disagrees with the cyclic gaps")
        return SimulationReport(
            horizon=horizon,
            valid=valid,
            first_invalid=first_bad,
            max_height=max((s.max_height for s in stats), default=Fraction(0)),
            max_discrepancy=max((s.discrepancy for s in stats), default=Fraction(0)),
            per_element=stats,
            exact=True,
            trajectory_max_height=trajectory_max,
        )

    stats = tuple(
        ElementStats(max_h[e], max_gap[e] if max_gap[e] else None, max_d[e], sampled[e])
        for e in range(n)
    )
    return SimulationReport(
        horizon=horizon,
        valid=first_invalid is None,
        first_invalid=first_invalid,
        max_height=trajectory_max,
        max_discrepancy=max(max_d, default=Fraction(0)),
        per_element=stats,
        exact=False,
        trajectory_max_height=trajectory_max,
    )


def _periodic_exact(inst: CbgtInstance, sched: Schedule, independent):
    P = sched.period
    first_bad = next((t for t, cut in enumerate(sched.core, 1) if not independent(cut)), None)
    stats = []
    for e in range(inst.n):
        g = inst.growth[e]
        pos = [t for t, cut in enumerate(sched.core, 1) if e in cut]
        if not pos:
            if g == 0:
                stats.append(ElementStats(Fraction(0), None, Fraction(0)))
            else:
                stats.append(ElementStats(INF, None, INF))
            continue
        gaps = [b - a for a, b in zip(pos, pos[1:])]
        gaps.append(pos[0] + P - pos[-1])
        gamma = max(gaps)
        if len(pos) != P * g:
            d: Number = INF
        else:
            d, A = Fraction(0), 0
            cuts = set(pos)
            for t in range(1, P + 1):
                A += t in cuts
                d = max(d, abs(t * g - A))
        stats.append(ElementStats(gamma * g, gamma, d))
    return stats, first_bad is None, first_bad


def discrepancy(inst: CbgtInstance, sched, horizon: int):
    """Per-element discrepancy and its maximum (see :func:`simulate`)."""
    rep = simulate(inst, sched, horizon)
    return rep.discrepancies, rep.max_discrepancy


@dataclass(frozen=True)
class ImplicationVerdict:
    """``holds`` tests ``d < 1 => h < 2`` on grow-then-cut heights.

    ``idle_height`` measures an element by its longest run of uncut days
    (``(gamma - 1) * g``), and ``idle_holds`` tests ``d < 1 => idle_height < 2``.
    The idle form always holds; the grow-then-cut form can reach ``h = 2``
    (e.g. g = 2/3 cut on days 1, 2, 5, 6 of a period of 6).
    """

    holds: bool
    discrepancy: Number
    height: Number
    exact: bool
    idle_height: Number = Fraction(0)
    idle_holds: bool = True


def _idle_height(s: ElementStats) -> Number:
    if s.recurrence is None:
        return s.max_height
    return s.max_height * Fraction(s.recurrence - 1, s.recurrence)


def check_disc_height_implication(report: SimulationReport) -> ImplicationVerdict:
    """``d(pi) < 1`` must imply ``h(pi) < 2``."""
    d, h = report.max_discrepancy, report.max_height
    idle = max((_idle_height(s) for s in report.per_element), default=Fraction(0))
    return ImplicationVerdict(holds=not (d < 1) or h < 2, discrepancy=d, height=h, exact=report.exact,
                              idle_height=idle, idle_holds=not (d < 1) or idle < 2)


def _num_json(x):
    if isinstance(x, Fraction):
        return fraction_to_json(x)
    if x == INF:
        return "inf"
    return x


def report_to_json(report: SimulationReport, labels: Optional[Sequence[str]] = None) -> dict:
    return {
        "horizon": report.horizon,
        "valid": report.valid,
        "first_invalid": report.first_invalid,
        "exact": report.exact,
        "max_height": _num_json(report.max_height),
        "max_discrepancy": _num_json(report.max_discrepancy),
        "elements": [
            {
                "id": e,
                "label": labels[e] if labels else str(e),
                "height": _num_json(s.max_height),
                "recurrence": s.recurrence,
                "discrepancy": _num_json(s.discrepancy),
                "counts": {str(t): a for t, a in sorted(s.counts.items())},
            }
            for e, s in enumerate(report.per_element)
        ],
    }


def _fmt(x) -> str:
    if x == INF:
        return "inf"
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else f"{x} (~{float(x):.4g})"
    return str(x)


def format_table(report: SimulationReport, labels: Optional[Sequence[str]] = None) -> str:
    rows = [("element", "h", "gamma", "d")]
    for e, s in enumerate(report.per_element):
        name = labels[e] if labels else str(e)
        rows.append((name, _fmt(s.max_height), "-" if s.recurrence is None else str(s.recurrence),
                     _fmt(s.discrepancy)))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    scope = "exact (periodic)" if report.exact else f"first {report.horizon} days"
    lines.append(f"h(pi) = {_fmt(report.max_height)}, d(pi) = {_fmt(report.max_discrepancy)}, "
                 f"valid = {report.valid}, {scope}")
    return "\n".join(lines)
