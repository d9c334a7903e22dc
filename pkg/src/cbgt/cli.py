"""Command-line front end.

Subcommands exchange JSON bundles ``{"instance", "schedule", "report"}`` on
stdin/stdout, so they compose in shell pipelines::

    cbgt generate binomial --k 2 | cbgt schedule general --days 120 | cbgt verify --bound log
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from itertools import islice

from . import __version__
from .coloring import coloring_for, colored_schedule
from .exact import exact_schedule
from .fun import fun_schedule
from .general import DEFAULT_C, interleaved_schedule, reduce_max_greedy
from .generators import (
    KINDS,
    gen_binomial_lb,
    gen_hypercube_lb,
    gen_random_normalized,
    gen_random_system,
    gen_tight_pair,
)
from .model import (
    DEFAULT_PRODUCT_BUDGET,
    InstanceError,
    Schedule,
    fraction_to_json,
    instance_from_json,
    instance_to_json,
    schedule_from_json,
    schedule_to_json,
    strip_zero_rate,
)
from .pinwheel import (
    DEFAULT_STATE_BUDGET,
    cps_from_cbgt,
    cps_from_json,
    cps_to_json,
    decide_schedulable,
    density,
    verify_pinwheel,
)
from .simulator import INF, format_table, report_to_json, simulate


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _read_json(path: str):
    name = "<stdin>" if path in (None, "-") else path
    try:
        text = sys.stdin.read() if name == "<stdin>" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise CliError(f"cannot read {name}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{name}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1)
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _instance_arg(args):
    obj = _read_json(getattr(args, "instance", None))
    bundle = obj if isinstance(obj, dict) and "instance" in obj else {"instance": obj}
    return instance_from_json(bundle["instance"]), bundle


def _schedule_arg(args, bundle):
    if getattr(args, "schedule", None):
        obj = _read_json(args.schedule)
        obj = obj.get("schedule", obj)
    elif "schedule" in bundle:
        obj = bundle["schedule"]
    else:
        raise CliError("no schedule given: pass --schedule or pipe a bundle that carries one")
    return schedule_from_json(obj)


def _horizon(sched: Schedule, requested):
    if requested:
        return requested
    return 3 * sched.period if sched.periodic else len(sched)


# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.family == "binomial":
        inst = gen_binomial_lb(args.k)
    elif args.family == "hypercube":
        inst = gen_hypercube_lb(args.k)
    elif args.family == "pair":
        inst = gen_tight_pair(Fraction(args.eps))
    elif args.family == "system":
        inst = gen_random_system(args.n, args.seed, args.generators, args.density)
    else:
        inst = gen_random_normalized(args.kind, args.n, args.seed, args.max_den, not args.no_witness)
    _emit({"instance": instance_to_json(inst)}, args.out)
    return 0


def cmd_schedule(args) -> int:
    inst, _ = _instance_arg(args)
    extra = {}
    if args.algorithm == "fun":
        sched = fun_schedule(inst)
    elif args.algorithm == "color":
        coloring = coloring_for(inst)
        sched = colored_schedule(inst, coloring).periodic_schedule()
        extra["coloring"] = {inst.labels[e]: c for e, c in enumerate(coloring.color)}
    elif args.algorithm == "exact":
        result = exact_schedule(inst, max_product=args.max_product)
        sched = result.schedule
        extra["period"] = result.period
        extra["balanced_discrepancy"] = fraction_to_json(result.balanced_report.max_discrepancy)
    else:
        days = args.days or 20 * inst.n
        if args.mode == "greedy":
            stream = reduce_max_greedy(inst)
        else:
            stream = interleaved_schedule(inst, args.mode, args.c, args.seed)
        sched = Schedule(tuple(islice(stream, days)))
    report = simulate(inst, sched, _horizon(sched, args.days))
    out = {"instance": instance_to_json(inst), "schedule": schedule_to_json(sched),
           "report": report_to_json(report, inst.labels)}
    out.update(extra)
    _emit(out, args.out)
    return 0 if report.valid else 1


def cmd_simulate(args) -> int:
    inst, bundle = _instance_arg(args)
    sched = _schedule_arg(args, bundle)
    report = simulate(inst, sched, _horizon(sched, args.horizon), samples=args.sample or ())
    if args.format == "table":
        print(format_table(report, inst.labels))
    else:
        _emit({"instance": instance_to_json(inst), "schedule": schedule_to_json(sched),
               "report": report_to_json(report, inst.labels)})
    return 0 if report.valid else 1


BOUNDS = {
    "height2": ("height", lambda n: 2, False),
    "height4": ("height", lambda n: 4, False),
    "disc1": ("discrepancy", lambda n: 1, False),
    "log": ("height", lambda n: 8 * math.log(n) if n > 1 else 2, True),
}


def cmd_verify(args) -> int:
    inst, bundle = _instance_arg(args)
    sched = _schedule_arg(args, bundle)
    report = simulate(inst, sched, _horizon(sched, args.horizon))
    if not report.valid:
        print(f"FAIL: cut on day {report.first_invalid} is not independent")
        return 1
    what, limit_of, inclusive = BOUNDS[args.bound]
    limit = limit_of(inst.n)
    for e, s in enumerate(report.per_element):
        value = s.max_height if what == "height" else s.discrepancy
        ok = value <= limit if inclusive else value < limit
        if not ok:
            shown = "inf" if value == INF else str(value)
            print(f"FAIL: element {inst.labels[e]} has {what} {shown}, bound {args.bound} = {limit}")
            return 1
    overall = report.max_height if what == "height" else report.max_discrepancy
    scope = "exact" if report.exact else f"over {report.horizon} days"
    print(f"PASS: {what} {overall} within bound {args.bound} = {limit} ({scope})")
    return 0


def cmd_pinwheel(args) -> int:
    if args.action == "reduce":
        inst, _ = _instance_arg(args)
        inst, _removed = strip_zero_rate(inst)
        _emit({"pinwheel": cps_to_json(cps_from_cbgt(inst, Fraction(args.c)))}, args.out)
        return 0
    obj = _read_json(args.cps)
    cps = cps_from_json(obj.get("pinwheel", obj))
    if args.action == "verify":
        sobj = _read_json(args.schedule)
        verdict = verify_pinwheel(cps, schedule_from_json(sobj.get("schedule", sobj)))
        print(json.dumps({"ok": verdict.ok, "valid": verdict.valid,
                          "recurrence": list(verdict.recurrence),
                          "violation": verdict.violation}, sort_keys=True))
        return 0 if verdict.ok else 1
    if args.action == "decide":
        d = decide_schedulable(cps, budget=args.budget)
        _emit({"schedulable": d.schedulable, "states": d.states,
               "schedule": schedule_to_json(d.witness) if d.witness else None}, args.out)
        return 0
    res = density(cps)
    _emit({"density": fraction_to_json(res.rho), "exact": res.exact,
           "certificate": [{"set": sorted(s), "weight": fraction_to_json(w)} for s, w in res.certificate]},
          args.out)
    return 0


def cmd_bench(args) -> int:
    from .bench import run_all

    results = run_all(quick=args.quick)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cbgt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated instance")
    gsub = g.add_subparsers(dest="family", required=True)
    for fam in ("binomial", "hypercube"):
        q = gsub.add_parser(fam)
        q.add_argument("--k", type=int, required=True)
    q = gsub.add_parser("pair")
    q.add_argument("--eps", default="1/4")
    q = gsub.add_parser("random")
    q.add_argument("--kind", choices=KINDS, default="uniform")
    q.add_argument("--n", type=int, default=6)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--max-den", type=int, default=6)
    q.add_argument("--no-witness", action="store_true")
    q = gsub.add_parser("system", help="random explicit set system")
    q.add_argument("--n", type=int, default=12)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--generators", type=int, default=3)
    q.add_argument("--density", type=float, default=0.7)
    for q in gsub.choices.values():
        q.add_argument("--out", default="-")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("schedule", help="build a schedule for an instance")
    s.add_argument("algorithm", choices=("fun", "color", "exact", "general"))
    s.add_argument("--instance", default="-")
    s.add_argument("--days", type=int, default=None)
    s.add_argument("--mode", choices=("efficient", "existential", "greedy"), default="efficient")
    s.add_argument("--c", type=float, default=DEFAULT_C)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-product", type=int, default=DEFAULT_PRODUCT_BUDGET)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_schedule)

    m = sub.add_parser("simulate", help="replay a schedule")
    m.add_argument("--instance", default="-")
    m.add_argument("--schedule", default=None)
    m.add_argument("--horizon", type=int, default=None)
    m.add_argument("--sample", type=int, action="append", help="report A(e, t) at this day")
    m.add_argument("--format", choices=("table", "json"), default="table")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check a named bound")
    v.add_argument("--instance", default="-")
    v.add_argument("--schedule", default=None)
    v.add_argument("--horizon", type=int, default=None)
    v.add_argument("--bound", choices=tuple(BOUNDS), required=True)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("pinwheel", help="pinwheel layer")
    w.add_argument("action", choices=("reduce", "verify", "decide", "density"))
    w.add_argument("--instance", default="-")
    w.add_argument("--cps", default="-")
    w.add_argument("--schedule", default=None)
    w.add_argument("--c", default="2")
    w.add_argument("--budget", type=int, default=DEFAULT_STATE_BUDGET)
    w.add_argument("--out", default="-")
    w.set_defaults(func=cmd_pinwheel)

    b = sub.add_parser("bench", help="run the acceptance corpus")
    b.add_argument("--quick", action="store_true", help="smaller corpus")
    b.set_defaults(func=cmd_bench)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "pinwheel" and args.action == "verify" and not args.schedule:
        print("error: pinwheel verify needs --schedule", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
