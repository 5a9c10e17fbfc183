"""``ifam`` command line: profile, prob, compress, search, layer2, construct, verify.

Exit status is 0 on success, 1 when a verification fails (or a compression
lowers a profile entry), 2 on usage, input or budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .compressions import apply_compression, monotone_check, parse_descriptor
from .constructions import NAMES, kkk_check, named_family
from .family import FamilyError, parse_family, serialize_family
from .layer2 import (
    Layer2Graph,
    crossover_csv,
    layer2_bound_value,
    max_p2,
    p2_count,
    quasi_graph,
    star_triangle_census,
)
from .profile import DEFAULT_LIMIT, intersecting_profile, mc_estimate, parse_rational, probability_eval
from .search import scan_families
from .verify import (
    SUITES,
    verify_construct,
    verify_duality,
    verify_l_stars,
    verify_l_strict,
    verify_l_strict_mid,
    verify_minimal,
    verify_not_nested,
    verify_phi,
    verify_t_unique,
    verify_triangle,
)


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_family(path: str, allow_empty: bool):
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    return parse_family(text, allow_empty=allow_empty)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ifam", description="Intersecting-family counting and search toolkit.")
    ap.add_argument("--version", action="version", version=f"ifam {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, json_flag=True):
        if json_flag:
            p.add_argument("--json", action="store_true", help="emit a JSON report")
        p.add_argument("--timing", action="store_true", help="embed wall time in the report")
        p.add_argument("--allow-empty", action="store_true", help="accept the empty set as a member")
        p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="member cap for exact counting")

    p = sub.add_parser("profile", help="intersecting profile of a family file")
    p.add_argument("file")
    p.add_argument("--s", type=int)
    common(p)

    p = sub.add_parser("prob", help="probability that the random subfamily is intersecting")
    p.add_argument("file")
    p.add_argument("--p", required=True)
    p.add_argument("--mc", type=int, metavar="TRIALS")
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("compress", help="apply a compression descriptor")
    p.add_argument("file")
    p.add_argument("--op", required=True, help="ij:i,j | up:src=..;tgt=.. | uvf:U=..;v=..;f=a-b,..")
    p.add_argument("--check-monotone", action="store_true")
    common(p)

    p = sub.add_parser("search", help="exhaustive search for optimal families")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s", type=_int_list, required=True)
    p.add_argument("--restrict", default="none", help="none | upset-only | layers:R")
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--jobs", type=int, default=1)
    common(p)

    p = sub.add_parser("layer2", help="graphs of 2-sets: quasi constructions, census, crossover, bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--kind", choices=("star", "complete"))
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--census", metavar="FILE")
    mode.add_argument("--max", action="store_true")
    mode.add_argument("--crossover", action="store_true")
    mode.add_argument("--bound", action="store_true", help="closing bound for 4..n")
    common(p)

    p = sub.add_parser("construct", help="build a named family")
    p.add_argument("--name", required=True, choices=NAMES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int)
    common(p)

    p = sub.add_parser("verify", help="run a verifier suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=_int_list)
    p.add_argument("--r", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    common(p, json_flag=False)
    return ap


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            _text(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}" for v in obj
        )
    return f"{pad}{obj}"


def _run(args) -> tuple[dict | str, int]:
    cmd = args.command
    if cmd == "profile":
        F = _read_family(args.file, args.allow_empty)
        prof = intersecting_profile(F, limit=args.limit)
        out = prof.to_json()
        if args.s is not None:
            out["s"] = args.s
            out["count"] = str(prof[args.s])
        return out, 0

    if cmd == "prob":
        F = _read_family(args.file, args.allow_empty)
        if args.mc:
            res = mc_estimate(F, float(parse_rational(args.p)), args.mc, args.seed)
        else:
            res = probability_eval(F, parse_rational(args.p), limit=args.limit)
        return res.to_json(), 0

    if cmd == "compress":
        F = _read_family(args.file, args.allow_empty)
        c = parse_descriptor(args.op)
        G = apply_compression(F, c)
        out = {"descriptor": args.op, "family": serialize_family(G)}
        code = 0
        if args.check_monotone:
            rep = monotone_check(F, c, limit=args.limit)
            out["monotone"] = rep.to_json()
            code = 1 if rep.falsified else 0
        return out, code

    if cmd == "search":
        res = scan_families(args.n, args.N, args.s, args.restrict, args.allow_empty, args.budget, args.jobs)
        reports = [res[s].to_json() for s in args.s]
        return (reports[0] if len(reports) == 1 else {"reports": reports}), 0

    if cmd == "layer2":
        if args.bound:
            rows = []
            for m in range(4, args.n + 1):
                v = layer2_bound_value(m)
                rows.append({"n": m, "value": f"{v.numerator}/{v.denominator}", "approx": float(v), "below_one": v < 1})
            return {"bound": rows}, 0
        if args.crossover:
            return crossover_csv(args.n), 0
        if args.census:
            F = _read_family(args.census, args.allow_empty)
            B = Layer2Graph.of(F)
            cen = star_triangle_census(B)
            return {"n": F.n, "edges": len(B), "a": [str(x) for x in cen.a], "b": cen.b, "p2": p2_count(B)}, 0
        if args.i is None:
            raise UsageError("layer2 needs one of --census, --crossover, --bound, or --i with --max or --kind")
        if args.max:
            res = max_p2(args.n, args.i)
            return {
                "n": args.n,
                "i": args.i,
                "value": res.value,
                "optima": [serialize_family(g.family()) for g in res.optima],
                "scanned": res.scanned,
            }, 0
        if args.kind is None:
            raise UsageError("--i needs --max or --kind")
        g = quasi_graph(args.n, args.i, args.kind)
        return {"n": args.n, "i": args.i, "kind": args.kind, "family": serialize_family(g.family()),
                "degrees": list(g.degrees), "p2": p2_count(g)}, 0

    if cmd == "construct":
        F = named_family(args.name, args.n, args.N)
        return {"name": args.name, "n": args.n, "N": F.N, "family": serialize_family(F),
                "kkk": kkk_check(F).to_json()}, 0

    if cmd == "verify":
        rep = _verify(args)
        out = rep.to_json()
        return out, 0 if rep.passed else 1

    raise UsageError(f"unknown command {cmd}")


def _verify(args):
    suite, n = args.suite, args.n
    s = args.s
    if suite == "t-unique":
        return verify_t_unique(n, s or [2], jobs=args.jobs)
    if suite == "l-strict":
        return verify_l_strict(n, 1 if args.l is None else args.l, s or [2, 3, 4], args.trials, args.seed)
    if suite == "l-strict-mid":
        return verify_l_strict_mid(n, s or [2, 3, 4], args.trials, args.seed)
    if suite == "l-stars":
        if args.r is None or not s:
            raise UsageError("l-stars needs --r and --s")
        return verify_l_stars(n, args.r, s[0])
    if suite == "triangle":
        return verify_triangle(n, s or list(range(3, 9)))
    if suite == "phi":
        if args.r is None or not s:
            raise UsageError("phi needs --r and --s")
        return verify_phi(n, args.r, s[0])
    if suite == "construct":
        return verify_construct(n, args.N)
    if suite == "minimal":
        return verify_minimal(n, args.t)
    if suite == "duality":
        return verify_duality(n)
    if suite == "not-nested":
        return verify_not_nested(n)
    raise UsageError(f"unknown suite {suite}")


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    t0 = time.perf_counter()
    try:
        body, code = _run(args)
    except (FamilyError, UsageError, ValueError) as e:
        print(f"ifam: error: {e}", file=stderr)
        return 2
    elapsed = time.perf_counter() - t0
    print(f"ifam: wall time {elapsed:.3f}s", file=stderr)

    if isinstance(body, str):  # CSV
        stdout.write(body)
        return code
    meta = {"version": __version__, "argv": argv}
    if getattr(args, "seed", None) is not None:
        meta["seed"] = args.seed
    if args.timing:
        meta["wall_time_s"] = round(elapsed, 6)
    report = {"meta": meta, **body}
    if getattr(args, "json", True):
        stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        stdout.write(_text(report) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
