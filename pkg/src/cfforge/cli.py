"""Command-line front end: validate / measure / act / scan the catalog entries.

All reports are JSON with schema tag "cf-forge/1"; rationals are emitted as
"p/q" strings and keys are sorted, so identical invocations are
byte-identical.  Exit codes: 0 success, 1 usage error, 2 validation
failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import catalog as cat
from . import factors, odometers, zstack
from .groups import CapExceeded, Heisenberg, HeisenbergCongruence, IntLine, ZModulus
from .measures import fmt_frac, parse_frac
from .cfcore import (
    DEFAULT_THRESHOLD,
    DEFAULT_VALIDATE_DEPTH,
    DEFAULT_PROBE_DEPTH,
    CFPoint,
    NeedsDeeperTail,
    act,
    check_schedule,
    cylinder_measure,
    folner_series,
    haar_totals,
    reduce_params,
    rn_derivative,
    series_verdict,
    telescope,
    validate_params,
)

SCHEMA = "cf-forge/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sanitize(obj):
    if isinstance(obj, Fraction):
        return fmt_frac(obj)
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((_sanitize(v) for v in obj), key=repr)
    if hasattr(obj, "to_json"):
        return _sanitize(obj.to_json())
    return obj


def emit(args, payload):
    payload = {"schema": SCHEMA, **_sanitize(payload)}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _entry(name, want=None):
    assert name in cat.ENTRIES, "unknown example %r" % name
    kind = cat.ENTRIES[name]["kind"]
    if want is not None:
        assert kind == want, "example %r is a %s, expected %s" % (name, kind, want)
    return cat.catalog(name)


def parse_elem(ctx, text):
    parts = [int(p) for p in text.split(",")]
    if isinstance(ctx, IntLine):
        assert len(parts) == 1
        return parts[0]
    return ctx.check(tuple(parts))


def parse_tail(ctx, text):
    if not text:
        return ()
    return tuple(parse_elem(ctx, piece) for piece in text.split(";"))


def parse_subgroup(ctx, text):
    kind, _, rest = text.partition(":")
    if kind == "mod":
        return ZModulus(ctx, int(rest))
    if kind == "hcong":
        a, b, c = (int(v) for v in rest.split(","))
        return HeisenbergCongruence(ctx, a, b, c)
    raise UsageError("unknown subgroup spec %r" % text)


def _point(T, args):
    tail = parse_tail(T.ctx, args.tail)
    f = parse_elem(T.ctx, args.f) if args.f else T.ctx.identity
    assert f in T.F(args.level), "f outside the level-%d shape" % args.level
    return CFPoint(args.level, f, tail)


# ---------------------------------------------------------------------------
# verb handlers
# ---------------------------------------------------------------------------

def cmd_validate(args):
    entry = _entry(args.example)
    if cat.ENTRIES[args.example]["kind"] == "chain":
        rep = odometers.validate_chain(entry, depth=args.depth)
        emit(args, {"command": "validate", "example": args.example,
                    "report": rep.to_json()})
        return 0 if rep.ok else 2
    rep = validate_params(entry, depth=args.depth,
                          threshold=parse_frac(args.threshold))
    emit(args, {"command": "validate", "example": args.example,
                "report": rep.to_json()})
    return 0 if rep.ok else 2


def cmd_measure(args):
    T = _entry(args.example, "params")
    if args.f is not None:
        w = cylinder_measure(T, args.level, parse_elem(T.ctx, args.f))
        emit(args, {"command": "measure", "example": args.example,
                    "level": args.level, "f": args.f, "mass": w})
        return 0
    totals = [T.nu(n).total for n in range(args.depth + 1)]
    emit(args, {"command": "measure", "example": args.example,
                "totals": totals})
    return 0


def cmd_act(args):
    T = _entry(args.example, "params")
    x = _point(T, args)
    g = parse_elem(T.ctx, args.g)
    y = act(T, g, x)
    emit(args, {"command": "act", "example": args.example,
                "g": g, "in": {"level": x.n, "f": x.f, "tail": x.tail},
                "out": {"level": y.n, "f": y.f, "tail": y.tail}})
    return 0


def cmd_rn(args):
    T = _entry(args.example, "params")
    x = _point(T, args)
    g = parse_elem(T.ctx, args.g)
    emit(args, {"command": "rn", "example": args.example, "g": g,
                "derivative": rn_derivative(T, g, x)})
    return 0


def cmd_telescope(args):
    T = _entry(args.example, "params")
    l = tuple(int(v) for v in args.schedule.split(","))
    check_schedule(l)
    S, _iota = telescope(T, l)
    rep = validate_params(S, depth=len(l) - 1)
    emit(args, {"command": "telescope", "example": args.example,
                "schedule": list(l), "report": rep.to_json()})
    return 0 if rep.ok else 2


def cmd_reduce(args):
    T = _entry(args.example, "params")
    keep = args.keep
    As = []
    for n in range(1, args.depth + 1):
        cs = sorted(T.C(n), key=T.ctx.key)
        assert 2 <= keep <= len(cs), "keep must be between 2 and |C_n|"
        assert T.ctx.identity in cs[:keep]
        As.append(cs[:keep])
    S, scaling, _iota = reduce_params(T, As)
    rep = validate_params(S, depth=args.depth)
    emit(args, {"command": "reduce", "example": args.example, "keep": keep,
                "scaling": [scaling(n) for n in range(args.depth + 1)],
                "report": rep.to_json()})
    return 0 if rep.ok else 2


def cmd_folner(args):
    T = _entry(args.example, "params")
    g = parse_elem(T.ctx, args.g)
    terms, verdict = folner_series(T, g, depth=args.depth,
                                   threshold=parse_frac(args.threshold))
    emit(args, {"command": "folner", "example": args.example, "g": g,
                "defects": terms, "verdict": verdict.to_json()})
    return 0


def cmd_haar(args):
    T = _entry(args.example, "params")
    out = haar_totals(T, depth=args.depth,
                      threshold=parse_frac(args.threshold))
    # the invariant version of the measure is finite iff sum(factor - 1)
    # converges
    verdict = series_verdict([q - 1 for q in out["factors"]],
                             threshold=parse_frac(args.threshold))
    emit(args, {"command": "haar", "example": args.example,
                "factors": out["factors"], "totals": out["totals"],
                "verdict": verdict.to_json()})
    return 0


def cmd_factor_sum(args):
    T = _entry(args.example, "params")
    Gamma = parse_subgroup(T.ctx, args.subgroup)
    g = parse_elem(T.ctx, args.g) if args.g else None
    terms, verdict = factors.coset_compatibility(
        T, Gamma, g=g, depth=args.depth, threshold=parse_frac(args.threshold))
    emit(args, {"command": "factor-sum", "example": args.example,
                "subgroup": args.subgroup, "terms": terms,
                "verdict": verdict.to_json()})
    return 0


def cmd_factor_scan(args):
    T = _entry(args.example, "params")
    Gamma = parse_subgroup(T.ctx, args.subgroup)
    rep = factors.finite_factor_scan(T, Gamma, max_depth=args.depth,
                                     threshold=parse_frac(args.threshold))
    emit(args, {"command": "factor-scan", "example": args.example,
                "subgroup": args.subgroup, "report": rep.to_json()})
    return 0


def cmd_total_ergodicity(args):
    T = _entry(args.example, "params")
    targets = [("mod:%d" % m, ZModulus(T.ctx, m))
               for m in (int(v) for v in args.moduli.split(","))]
    out = factors.total_ergodicity_scan(T, targets, max_depth=args.depth,
                                        threshold=parse_frac(args.threshold))
    emit(args, {"command": "total-ergodicity", "example": args.example,
                "all_refuted": out["all_refuted"],
                "reports": {k: v.to_json() for k, v in out["reports"].items()}})
    return 0


def cmd_stack(args):
    T = _entry(args.example, "params")
    layouts = zstack.columns(T, args.levels)
    payload = {
        "command": "stack", "example": args.example, "levels": args.levels,
        "stages": [
            {"n": lay.n,
             "intervals": {str(k): [lo, hi]
                           for k, (lo, hi) in sorted(lay.intervals.items())},
             "total": lay.total()}
            for lay in layouts
        ],
    }
    emit(args, payload)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(zstack.render_svg(T, args.levels) + "\n")
    return 0


def cmd_example(args):
    if args.action == "list":
        emit(args, {"command": "example",
                    "entries": {name: {"kind": cat.ENTRIES[name]["kind"],
                                       "doc": cat.ENTRIES[name]["doc"]}
                                for name in cat.names()}})
        return 0
    if not args.name:
        raise UsageError("example show needs a name")
    entry = _entry(args.name)
    kind = cat.ENTRIES[args.name]["kind"]
    info = {"command": "example", "name": args.name, "kind": kind,
            "doc": cat.ENTRIES[args.name]["doc"]}
    if kind == "params":
        info["group"] = entry.ctx.describe()
        info["C"] = {str(n): sorted(entry.C(n), key=entry.ctx.key)
                     for n in range(1, 4)}
        info["heights"] = {str(n): len(entry.F(n)) for n in range(0, 4)}
    elif kind == "chain":
        info["group"] = entry.ctx.describe()
        info["levels"] = {str(n): entry.gamma(n).describe()
                          for n in range(1, min(4, entry.depth_cap) + 1)}
    elif kind == "scenario":
        info["points"] = list(entry.points)
        info["order"] = entry.ctx.order
    emit(args, info)
    return 0


# ---------------------------------------------------------------------------
# odometer sub-verbs
# ---------------------------------------------------------------------------

def _chain(args):
    return _entry(args.chain, "chain")


def cmd_odometer(args):
    spec = _chain(args)
    sub = args.subcommand
    if sub == "validate":
        rep = odometers.validate_chain(spec, depth=args.depth)
        emit(args, {"command": "odometer validate", "chain": args.chain,
                    "report": rep.to_json()})
        return 0 if rep.ok else 2
    if sub == "act":
        y = odometers.CosetChain(parse_tail(spec.ctx, args.tail))
        odometers.check_chain(spec, y)
        g = parse_elem(spec.ctx, args.g)
        out = odometers.odometer_act(spec, g, y)
        emit(args, {"command": "odometer act", "chain": args.chain, "g": g,
                    "in": y.reps, "out": out.reps,
                    "keys": odometers.chain_keys(spec, out)})
        return 0
    if sub == "cross-sections":
        Ds = odometers.cross_sections(spec, args.depth)
        counts = odometers.omega_check(spec, Ds, args.depth)
        emit(args, {"command": "odometer cross-sections", "chain": args.chain,
                    "sections": [list(D) for D in Ds], "coset_counts": counts})
        return 0
    if sub == "build-rank-one":
        T = odometers.rank_one_odometer_params(spec, args.depth)
        rep = validate_params(T, depth=args.depth)
        emit(args, {"command": "odometer build-rank-one", "chain": args.chain,
                    "report": rep.to_json()})
        return 0 if rep.ok else 2
    if sub == "cover":
        build = odometers.rank_one_cover(spec, args.depth)
        rep = validate_params(build.params, depth=args.depth)
        taus = [odometers.tau_check(spec, build.Cs, n)
                for n in range(1, args.depth + 1)]
        emit(args, {"command": "odometer cover", "chain": args.chain,
                    "copy_sizes": [len(C) for C in build.Cs],
                    "tau_counts": taus, "report": rep.to_json()})
        return 0 if rep.ok else 2
    if sub == "normal-cover":
        rep = odometers.normal_cover(spec, args.depth)
        emit(args, {"command": "odometer normal-cover", "chain": args.chain,
                    "levels": [{"n": lv.n, "ratio": lv.ratio,
                                "route": lv.certificate["route"],
                                "alternating": lv.alternating}
                               for lv in rep.levels],
                    "consistency": rep.consistency,
                    "extendable": rep.extendable})
        return 0
    T = _entry(args.example, "params")
    if sub == "compat":
        terms, verdict = odometers.odometer_compatibility(
            T, spec, depth=args.depth, shift=args.shift,
            threshold=parse_frac(args.threshold))
        emit(args, {"command": "odometer compat", "chain": args.chain,
                    "example": args.example, "shift": args.shift,
                    "terms": terms, "verdict": verdict.to_json()})
        return 0
    if sub == "factor-map":
        x = _point(T, args)
        out = odometers.odometer_factor_map(T, spec, x)
        emit(args, {"command": "odometer factor-map", "chain": args.chain,
                    "example": args.example, "result": out})
        return 0
    if sub == "iso-check":
        rep = odometers.isomorphism_check(
            T, spec, n=args.level, eps=parse_frac(args.eps),
            l_max=args.lmax, m_max=args.mmax)
        emit(args, {"command": "odometer iso-check", "chain": args.chain,
                    "example": args.example, "report": rep.to_json()})
        return 0
    raise UsageError("unknown odometer subcommand %r" % sub)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="cfforge", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, depth=DEFAULT_VALIDATE_DEPTH):
        sp.add_argument("--depth", type=int, default=depth)
        sp.add_argument("--threshold", default=fmt_frac(DEFAULT_THRESHOLD))
        sp.add_argument("--json", default=None)

    def point_args(sp):
        sp.add_argument("--level", type=int, default=0)
        sp.add_argument("--f", default=None)
        sp.add_argument("--tail", default="")

    sp = sub.add_parser("validate")
    sp.add_argument("--example", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("measure")
    sp.add_argument("--example", required=True)
    sp.add_argument("--level", type=int, default=0)
    sp.add_argument("--f", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_measure)

    sp = sub.add_parser("act")
    sp.add_argument("--example", required=True)
    sp.add_argument("--g", required=True)
    point_args(sp)
    common(sp)
    sp.set_defaults(fn=cmd_act)

    sp = sub.add_parser("rn")
    sp.add_argument("--example", required=True)
    sp.add_argument("--g", required=True)
    point_args(sp)
    common(sp)
    sp.set_defaults(fn=cmd_rn)

    sp = sub.add_parser("telescope")
    sp.add_argument("--example", required=True)
    sp.add_argument("--schedule", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_telescope)

    sp = sub.add_parser("reduce")
    sp.add_argument("--example", required=True)
    sp.add_argument("--keep", type=int, default=3)
    common(sp, depth=4)
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("folner")
    sp.add_argument("--example", required=True)
    sp.add_argument("--g", required=True)
    common(sp, depth=DEFAULT_PROBE_DEPTH)
    sp.set_defaults(fn=cmd_folner)

    sp = sub.add_parser("haar")
    sp.add_argument("--example", required=True)
    common(sp, depth=DEFAULT_PROBE_DEPTH)
    sp.set_defaults(fn=cmd_haar)

    sp = sub.add_parser("factor-sum")
    sp.add_argument("--example", required=True)
    sp.add_argument("--subgroup", required=True)
    sp.add_argument("--g", default=None)
    common(sp, depth=10)
    sp.set_defaults(fn=cmd_factor_sum)

    sp = sub.add_parser("factor-scan")
    sp.add_argument("--example", required=True)
    sp.add_argument("--subgroup", required=True)
    common(sp, depth=10)
    sp.set_defaults(fn=cmd_factor_scan)

    sp = sub.add_parser("total-ergodicity")
    sp.add_argument("--example", required=True)
    sp.add_argument("--moduli", default="2,3,5,7")
    common(sp, depth=10)
    sp.set_defaults(fn=cmd_total_ergodicity)

    sp = sub.add_parser("stack")
    sp.add_argument("--example", required=True)
    sp.add_argument("-N", "--levels", type=int, default=3)
    sp.add_argument("--svg", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_stack)

    sp = sub.add_parser("example")
    sp.add_argument("action", choices=("list", "show"))
    sp.add_argument("name", nargs="?", default=None)
    sp.add_argument("--json", default=None)
    sp.set_defaults(fn=cmd_example)

    sp = sub.add_parser("odometer")
    sp.add_argument("subcommand", choices=(
        "validate", "act", "cross-sections", "build-rank-one", "normal-cover",
        "cover", "compat", "factor-map", "iso-check"))
    sp.add_argument("--chain", required=True)
    sp.add_argument("--example", default=None)
    sp.add_argument("--g", default=None)
    sp.add_argument("--shift", type=int, default=0)
    sp.add_argument("--eps", default="1/4")
    sp.add_argument("--lmax", type=int, default=8)
    sp.add_argument("--mmax", type=int, default=8)
    point_args(sp)
    common(sp, depth=4)
    sp.set_defaults(fn=cmd_odometer)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except (CapExceeded, NeedsDeeperTail) as exc:
        print("resource cap: %s" % exc, file=sys.stderr)
        return 3
    except AssertionError as exc:
        print("validation failure: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
