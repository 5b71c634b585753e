"""Command line front end: ``hilbstab <command> --surface <file|preset> ...``."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .chow import integrate
from .cyclelang import EvalError, ParseError, evaluate, format_cycle, parse_divisor
from .exactmath import AlwaysFrom, parse_rational
from .identities import run_identity_suite
from .stabscan import (
    DEFAULT_CAP,
    ScanBox,
    ScanError,
    TrivialSheafWarning,
    analytic_certificate,
    recheck,
    scan,
)
from .surface import PRESETS, SurfaceData, SurfaceError, load_surface_file, preset
from .taut import (
    LineClass,
    TautSpec,
    destabilize_verdict,
    exclusion_filter,
    slope,
    slope_line_closed,
    slope_taut_closed,
    taut_c1,
)


class UsageError(ValueError):
    pass


def split_top_level(text: str) -> list[str]:
    """Split on commas that are not inside brackets or parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def load_surface_arg(spec: str) -> SurfaceData:
    path = Path(spec)
    if path.is_file():
        return load_surface_file(path)
    try:
        return preset(spec)
    except KeyError:
        raise UsageError(f"{spec!r} is neither a surface file nor a preset ({', '.join(PRESETS)}, k3:<d>)") from None


def divisor_arg(text: str, s: SurfaceData):
    """Divisor from the command line; on Picard rank one a bare number is the coefficient."""
    if s.rho == 1:
        try:
            return (parse_rational(text),)
        except ValueError:
            pass
    return parse_divisor(text, s)


def parse_line_arg(text: str, s: SurfaceData) -> LineClass:
    parts = split_top_level(text)
    if len(parts) != 3:
        raise UsageError(f"--line needs g,h,a; got {text!r}")
    g, h = (divisor_arg(p, s) for p in parts[:2])
    return LineClass(g, h, parse_rational(parts[2]))


def parse_taut_arg(text: str, s: SurfaceData) -> TautSpec:
    parts = split_top_level(text)
    if len(parts) != 2:
        raise UsageError(f"--taut needs r,f; got {text!r}")
    try:
        r = int(parts[0])
    except ValueError:
        raise UsageError(f"rank must be an integer, got {parts[0]!r}") from None
    return TautSpec(r, divisor_arg(parts[1], s))


def parse_interval(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise UsageError(f"interval must look like lo:hi, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"interval bounds must be integers, got {text!r}") from None


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


# --- commands ---------------------------------------------------------------------


def cmd_eval(args, s: SurfaceData) -> int:
    c = evaluate(args.expr, s)
    print(format_cycle(c, s))
    if args.integrate:
        print(f"integral: {integrate(c)}")
    return 0


def cmd_slope(args, s: SurfaceData) -> int:
    fmt = lambda c: format_cycle(c, s)  # noqa: E731
    if args.line:
        l = parse_line_arg(args.line, s)
        report = slope(l.c1(), 1, s, subject=f"line {l}")
        closed = slope_line_closed(l, 1, s)
    else:
        t = parse_taut_arg(args.taut, s)
        report = slope(taut_c1(t), t.taut_rank, s, subject=f"taut r={t.r} f={_vec(t.f)}")
        closed = slope_taut_closed(t, s)
    print(report.render(fmt))
    print(f"closed form agrees: {'yes' if closed == report.slope else 'no'}")
    return 0


def _verdict_lines(l: LineClass, t: TautSpec, s: SurfaceData) -> list[str]:
    v = destabilize_verdict(l, t, s)
    x = exclusion_filter(l, t, s)
    branch = "strict" if v.strict else "equality"
    return [
        f"line: {l}",
        f"taut: r={t.r} f={_vec(t.f)}",
        f"r*H.(g+h) = {v.lhs}, H.f = {v.rhs} ({branch} branch)",
        f"verdict: {'Destabilizing' if v.destabilizing else 'NotDestabilizing'}",
        f"exclusion: {x.label}",
        f"threshold: {v.threshold}",
    ]


def cmd_verdict(args, s: SurfaceData) -> int:
    print("\n".join(_verdict_lines(parse_line_arg(args.line, s), parse_taut_arg(args.taut, s), s)))
    return 0


def cmd_threshold(args, s: SurfaceData) -> int:
    l = parse_line_arg(args.line, s)
    t = parse_taut_arg(args.taut, s)
    v = destabilize_verdict(l, t, s)
    diff = v.difference if v.destabilizing else -v.difference
    direction = "slope(line) - slope(taut)" if v.destabilizing else "slope(taut) - slope(line)"
    print(f"difference: {direction} = {diff}")
    print(f"threshold: {v.threshold}")
    if isinstance(v.threshold, AlwaysFrom):
        M = v.threshold.M
        print(f"value at M={M}: {diff(M)}")
    return 0


def cmd_scan(args, s: SurfaceData) -> int:
    f = divisor_arg(args.f, s)
    t = TautSpec(args.rank, f)
    bounds = tuple(parse_interval(p) for p in args.gbox.split(","))
    if len(bounds) == 1:
        bounds = bounds * s.rho
    box = ScanBox(bounds, parse_interval(args.abox), not args.asymmetric, args.cap)
    nontrivial = any(f)
    if not nontrivial and not args.allow_trivial_f:
        print("warning: f = 0; the no-destabilizing-line-subbundle statement needs F not isomorphic to O_X", file=sys.stderr)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TrivialSheafWarning)
        result = scan(box, t, s, assume_nontrivial=nontrivial, workers=args.workers)
    result.flags["allow_trivial_f"] = args.allow_trivial_f
    if not recheck(result):
        raise AssertionError("independent recheck disagrees with the scan")
    if args.json:
        text = result.to_json()
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n")
    if args.json != "-":
        print(result.render())
    if args.analytic:
        cert = analytic_certificate(t, s)
        print(f"analytic: destabilizing for {cert.destabilizing_from}; {cert.note}")
        print(f"analytic certified: {'yes' if cert.certified else 'no'}")
    return 0 if result.certified else 1


def cmd_check_identities(args, s: SurfaceData) -> int:
    results = run_identity_suite(s, trials=args.trials, seed=args.seed, axiom_trials=args.axiom_trials)
    for r in results:
        print(r.render())
    failed = [r for r in results if not r.ok]
    print(f"passed: {len(results) - len(failed)}/{len(results)}")
    return 0 if not failed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hilbstab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def with_surface(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--surface", required=True, help="surface file or preset name")
        return sp

    sp = with_surface("eval", "evaluate a cycle expression")
    sp.add_argument("expr")
    sp.add_argument("--integrate", action="store_true", help="also print the degree")
    sp.set_defaults(func=cmd_eval)

    sp = with_surface("slope", "slope against the pulled-back H_N")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--line", help="g,h,a")
    g.add_argument("--taut", help="r,f")
    sp.set_defaults(func=cmd_slope)

    for name, func, text in (
        ("verdict", cmd_verdict, "destabilization verdict and exclusion status"),
        ("threshold", cmd_threshold, "first N from which the slope comparison holds"),
    ):
        sp = with_surface(name, text)
        sp.add_argument("--taut", required=True, help="r,f")
        sp.add_argument("--line", required=True, help="g,h,a")
        sp.set_defaults(func=func)

    sp = with_surface("scan", "enumerate a box of line classes")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--f", required=True, help="divisor name, combination or [v1,v2,...]")
    sp.add_argument("--gbox", required=True, help="lo:hi, or one lo:hi per coordinate")
    sp.add_argument("--abox", required=True, help="lo:hi")
    sp.add_argument("--asymmetric", action="store_true", help="enumerate g and h independently")
    sp.add_argument("--allow-trivial-f", action="store_true", help="accept f = 0 without a warning")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--json", metavar="PATH", help="write the structured report ('-' for stdout)")
    sp.add_argument("--analytic", action="store_true", help="Picard rank one: decide the whole lattice")
    sp.set_defaults(func=cmd_scan)

    sp = with_surface("check-identities", "randomized ring identity suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--axiom-trials", type=int, default=20)
    sp.set_defaults(func=cmd_check_identities)
    return p


VALUE_OPTIONS = ("--line", "--taut", "--f", "--gbox", "--abox")


def _glue_values(argv: list[str]) -> list[str]:
    # argparse refuses values such as "-5:5" or "-H,H,0" after a separate option word
    out, i = [], 0
    while i < len(argv):
        if argv[i] in VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        s = load_surface_arg(args.surface)
        return args.func(args, s)
    except ParseError as e:
        expr = getattr(args, "expr", None)
        if expr is not None:
            print(expr, file=sys.stderr)
            print(" " * (e.column - 1) + "^", file=sys.stderr)
        print(f"error: {e}", file=sys.stderr)
    except (UsageError, EvalError, ScanError, SurfaceError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
