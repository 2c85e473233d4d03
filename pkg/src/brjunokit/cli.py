"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 undecidable or infeasible at the
configured limits (partial output is kept), 1 any other failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from fractions import Fraction

from . import __version__

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_UNDECIDABLE = 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def _parse_cf(text):
    from .contfrac import parse

    try:
        return parse(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc))


def _parse_prefix(text):
    cf = _parse_cf(text if text.strip().startswith("[") else f"[{text}]")
    return list(cf.prefix)


def _parse_number(text) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}")


def parse_complex(text: str) -> tuple:
    """'0+0i', '-2', '-0.12+0.75i', '1/4', '-i' -> (Fraction, Fraction)."""
    t = text.replace(" ", "")
    if not t:
        raise UsageError("empty complex number")
    m = re.fullmatch(r"([+-]?[0-9./eE]+)?(?:([+-])([0-9./eE]*)[ij])?", t)
    if m and (m.group(1) or m.group(2)):
        re_part = _parse_number(m.group(1)) if m.group(1) else Fraction(0)
        im_part = Fraction(0)
        if m.group(2):
            mag = _parse_number(m.group(3)) if m.group(3) else Fraction(1)
            im_part = mag if m.group(2) == "+" else -mag
        return re_part, im_part
    m = re.fullmatch(r"([+-]?)([0-9./eE]*)[ij]", t)
    if m:
        mag = _parse_number(m.group(2)) if m.group(2) else Fraction(1)
        return Fraction(0), (-mag if m.group(1) == "-" else mag)
    raise UsageError(f"not a complex number: {text!r}")


def _c_interval(c_pair):
    from .intervals import ComplexInterval, Interval, precision

    with precision(96):
        return ComplexInterval(Interval(c_pair[0]), Interval(c_pair[1]))


# ---------------------------------------------------------------------------
# output helpers


def atomic_write(path: str, data) -> None:
    """Write to a temporary file in the target directory, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data if isinstance(data, bytes) else data.encode())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config_line(args) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return "# config: " + json.dumps(cfg, sort_keys=True, default=str)


def _csv(rows, header) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit_table(args, header, rows, default_name=None):
    """Write rows as CSV or JSONL (config echo first) to --out, or to stdout."""
    fmt = getattr(args, "format", "csv")
    if fmt == "jsonl":
        body = "".join(json.dumps(dict(zip(header, r)), default=str) + "\n" for r in rows)
    else:
        body = _csv(rows, header)
    text = _config_line(args) + "\n" + body
    out = getattr(args, "out", None)
    if out:
        atomic_write(out, text)
        return [out]
    sys.stdout.write(text)
    return []


def _summary(**fields):
    print(json.dumps(fields, sort_keys=True, default=str))


def _fmt(iv, digits=17):
    from .intervals import format_interval

    return format_interval(iv, digits)


def _ends(iv, digits=17):
    from .intervals import _decimal_bound

    return str(_decimal_bound(iv.lo, digits, False)), str(_decimal_bound(iv.hi, digits, True))


# ---------------------------------------------------------------------------
# subcommands


def cmd_phi(args):
    from .brjuno import phi, phi_trunc
    from .contfrac import Tail

    cf = _parse_cf(args.cf)
    if cf.tail is Tail.TERMINATING:
        iv = phi_trunc(cf.canonical().exact_value(), args.prec)
        kind = "truncated"
    else:
        iv = phi(cf, args.prec)
        kind = "series"
    digits = max(6, int(args.prec * 0.30103) + 3)
    text = f"{iv.mid()!r}" if args.midpoint else _fmt(iv, digits)
    lo, hi = _ends(iv, digits)
    rows = [[str(cf), kind, lo, hi]]
    outs = _emit_table(args, ["cf", "kind", "phi_lo", "phi_hi"], rows) if args.out else []
    if not args.out:
        print(text)
    _summary(subcommand="phi", status="ok", cf=str(cf), kind=kind, phi=text, outputs=outs)
    return EXIT_OK


def cmd_convergents(args):
    from .contfrac import convergents

    cf = _parse_cf(args.cf)
    conv = convergents(cf, args.n)
    rows = [[c.index, cf.digit(c.index), c.p, c.q] for c in conv]
    outs = _emit_table(args, ["k", "a_k", "p_k", "q_k"], rows)
    _summary(subcommand="convergents", status="ok", count=len(rows), outputs=outs)
    return EXIT_OK


def cmd_perturb_search(args):
    from .perturb import choose_m_certificate, find_N, tail_guard_certificate

    prefix = _parse_prefix(args.prefix)
    eps = _parse_number(args.epsilon)
    if eps <= 0:
        raise UsageError("epsilon must be positive")
    choice = choose_m_certificate(prefix, eps)
    m = args.m or choice.m
    guard = tail_guard_certificate(prefix, eps)
    plan = find_N(prefix, m, eps, sweep_limit=args.sweep, max_digit_bits=args.max_digit_bits)
    lo_b, hi_b = _ends(plan.phi_before)
    lo_a, hi_a = _ends(plan.phi_after)
    lo_i, hi_i = _ends(plan.increment)
    header = ["prefix", "m", "epsilon", "N_bits", "N", "method", "phi_before_lo", "phi_before_hi",
              "phi_after_lo", "phi_after_hi", "increment_lo", "increment_hi", "step_checks",
              "step_violations", "step_bound_all_N", "guard_m0"]
    row = [" ".join(map(str, prefix)), m, str(eps), plan.N.bit_length(), plan.N, plan.method, lo_b, hi_b,
           lo_a, hi_a, lo_i, hi_i, plan.step_checks, len(plan.step_violations),
           plan.step_bound_for_all_N, guard.m0]
    outs = _emit_table(args, header, [row])
    _summary(subcommand="perturb-search", status="ok", m=m, N_bits=plan.N.bit_length(),
             increment=_fmt(plan.increment, 12), outputs=outs)
    return EXIT_OK


def cmd_staircase(args):
    from .perturb import default_schedule, run_staircase

    prefix = _parse_prefix(args.prefix)
    schedule = None
    if args.schedule:
        schedule = [_parse_number(s) for s in args.schedule.split(",")]
    else:
        schedule = default_schedule(args.steps)
    res = run_staircase(prefix, schedule, args.steps, sweep_limit=args.sweep,
                        max_digit_bits=args.max_digit_bits)
    header = ["step", "prefix", "N", "m", "guard_m0", "epsilon", "phi_lo", "phi_hi",
              "increment_lo", "increment_hi", "window_lo", "window_hi"]
    rows = []
    for st in res.states:
        plo, phi_hi = _ends(st.phi)
        wlo, whi = _ends(st.window)
        if st.step:
            ilo, ihi = _ends(st.step.increment)
            rows.append([st.index, " ".join(map(str, st.prefix)), st.step.N, st.step.m, st.step.guard_m0,
                         str(st.step.epsilon), plo, phi_hi, ilo, ihi, wlo, whi])
        else:
            rows.append([st.index, " ".join(map(str, st.prefix)), "", "", "", "", plo, phi_hi, "", "", wlo, whi])
    outs = _emit_table(args, header, rows)
    if res.error is not None:
        _summary(subcommand="staircase", status="incomplete", steps_done=len(res.states) - 1,
                 error=type(res.error).__name__, detail=str(res.error), outputs=outs)
        return EXIT_UNDECIDABLE
    _summary(subcommand="staircase", status="ok", steps_done=len(res.states) - 1, outputs=outs)
    return EXIT_OK


def _theta_list(args):
    if args.theta:
        return [_parse_number(t) for t in args.theta.split(",")]
    out = []
    if args.family == "fibonacci":
        a, b = 1, 2
        while b <= args.max_q:
            out.append(Fraction(a, b))
            a, b = b, a + b
    else:
        from math import gcd
        for q in range(1, args.max_q + 1):
            for p in range(1, q + 1):
                if gcd(p, q) == 1:
                    out.append(Fraction(p, q))
    return out


def cmd_upsilon_table(args):
    from .dynamics import upsilon_rational_record

    header = ["p", "q", "phi_trunc_lo", "phi_trunc_hi", "absA_lo", "absA_hi", "L_lo", "L_hi",
              "upsilon_lo", "upsilon_hi", "convention_dependent"]
    rows = []
    for t in _theta_list(args):
        r = upsilon_rational_record(t)
        ivs = (r.phi_trunc, r.abs_A, r.L, r.upsilon)
        if args.midpoint:
            vals = [repr(iv.mid()) for iv in ivs]
        else:
            vals = [e for iv in ivs for e in _ends(iv)]
        rows.append([r.p, r.q] + vals + [r.convention_dependent])
    if args.midpoint:
        header = ["p", "q", "phi_trunc", "absA", "L", "upsilon", "convention_dependent"]
    outs = _emit_table(args, header, rows)
    _summary(subcommand="upsilon-table", status="ok", rows=len(rows), outputs=outs)
    return EXIT_OK


def _parse_viewport(text):
    from .julia import Viewport

    parts = [p for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError("viewport needs xmin,xmax,ymin,ymax")
    try:
        return Viewport(*[_parse_number(p) for p in parts])
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_render(args):
    from . import julia

    res = args.resolution
    if res < 1 or res & (res - 1):
        raise UsageError("resolution must be a power of two")
    c_pair = parse_complex(args.c)
    vp = _parse_viewport(args.viewport) if args.viewport else None
    grid, balls = julia.render(_c_interval(c_pair), vp, args.m, args.maxiter, res, args.refine_depth,
                               args.threads, args.backend)
    outs = []
    cfg = _config_line(args)
    if args.out:
        if args.out.endswith(".ppm") or args.image_format == "ppm":
            data = julia.ppm_bytes(julia.color_image(grid), cfg[2:])
        else:
            data = julia.pgm_bytes(julia.verdict_image(grid), cfg[2:])
        atomic_write(args.out, data)
        outs.append(args.out)
    if args.balls:
        claim = balls.claimed_precision
        head = cfg + "\n" + f"# claimed_precision: {'none' if claim is None else f'2^-{claim}'}\n"
        atomic_write(args.balls, head + balls.to_jsonl())
        outs.append(args.balls)
    counts = grid.counts()
    _summary(subcommand="render", status="ok", counts=counts, balls=len(balls),
             claimed_precision=balls.claimed_precision, viewport=[str(v) for v in (
                 grid.viewport.xmin, grid.viewport.xmax, grid.viewport.ymin, grid.viewport.ymax)],
             outputs=outs)
    return EXIT_OK


def cmd_radius(args):
    from .siegel import conformal_radius, koebe_check, linearizer_coeffs, running_estimates, upsilon_estimate

    cf = _parse_cf(args.cf)
    series = linearizer_coeffs(cf, args.order, args.backend)
    est = conformal_radius(cf, args.order, series=series)
    ups = upsilon_estimate(cf, args.order, backend=args.backend)
    koebe = koebe_check(cf, est.point_estimate, maxiter=args.koebe_iter)
    outs = []
    if args.diagnostics:
        rows = running_estimates(series)
        outs += _emit_table(argparse.Namespace(**{**vars(args), "out": args.diagnostics, "format": "csv"}),
                            ["k", "abs_b_k_root", "running_estimate"], rows)
    lo = min(v for _, v in est.window_estimates)
    hi = max(v for _, v in est.window_estimates)
    if args.midpoint:
        r_text = f"{est.point_estimate!r} (non-rigorous)"
    else:
        r_text = f"window [{lo!r}, {hi!r}], median {est.point_estimate!r} (non-rigorous)"
    print(f"r_hat: {r_text}")
    print(f"phi: {_fmt(ups.phi, 15)}")
    print(f"upsilon_hat: {ups.value!r} (non-rigorous)")
    _summary(subcommand="radius", status="ok", r_hat=est.point_estimate, rigorous=False,
             oscillation=est.oscillation, upsilon_hat=ups.value, koebe_escaped=koebe.escaped, outputs=outs)
    return EXIT_OK


def _load_balls(path):
    from .julia import DyadicBallSet

    try:
        with open(path) as fh:
            return DyadicBallSet.from_jsonl(fh.read())
    except OSError as exc:
        raise UsageError(str(exc))


def cmd_hausdorff(args):
    from .julia import Circle, Segment, hausdorff, hausdorff_to_reference

    a = _load_balls(args.a)
    if args.b:
        lo, hi = hausdorff(a, _load_balls(args.b), args.tol)
        target = args.b
    elif args.circle:
        cx, cy, r = (float(_parse_number(v)) for v in args.circle.split(","))
        lo, hi = hausdorff_to_reference(a, Circle(cx, cy, r), args.tol)
        target = f"circle({args.circle})"
    elif args.segment:
        ax, ay, bx, by = (float(_parse_number(v)) for v in args.segment.split(","))
        lo, hi = hausdorff_to_reference(a, Segment(ax, ay, bx, by), args.tol)
        target = f"segment({args.segment})"
    else:
        raise UsageError("give --b, --circle or --segment")
    print(f"[{lo!r}, {hi!r}]")
    _summary(subcommand="hausdorff", status="ok", a=args.a, b=target, lower=lo, upper=hi)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="brjunokit", description="Brjuno-type sums, perturbations and Julia sets.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def out_flags(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=["csv", "jsonl"], default="csv")

    s = sub.add_parser("phi", help="enclose phi of a continued fraction")
    s.add_argument("--cf", required=True, help="e.g. '[1,1,1,20;ones]' or '[1,1,1,...]'")
    s.add_argument("--prec", type=int, default=53, help="width at most 2^-prec")
    s.add_argument("--midpoint", action="store_true")
    out_flags(s)
    s.set_defaults(func=cmd_phi)

    s = sub.add_parser("convergents", help="list convergents p_k/q_k")
    s.add_argument("--cf", required=True)
    s.add_argument("--n", type=int, default=10)
    out_flags(s)
    s.set_defaults(func=cmd_convergents)

    s = sub.add_parser("perturb-search", help="find a digit raising phi by (eps, 2 eps)")
    s.add_argument("--prefix", required=True)
    s.add_argument("--epsilon", required=True)
    s.add_argument("--m", type=int, default=0, help="offset (default: smallest certified)")
    s.add_argument("--sweep", type=int, default=2048)
    s.add_argument("--max-digit-bits", type=int, default=1 << 22)
    out_flags(s)
    s.set_defaults(func=cmd_perturb_search)

    s = sub.add_parser("staircase", help="run the increasing phi staircase")
    s.add_argument("--prefix", required=True)
    s.add_argument("--steps", type=int, default=5)
    s.add_argument("--schedule", help="comma-separated eps_1,...; default 2^-i")
    s.add_argument("--sweep", type=int, default=2048)
    s.add_argument("--max-digit-bits", type=int, default=1 << 22)
    out_flags(s)
    s.set_defaults(func=cmd_staircase)

    s = sub.add_parser("upsilon-table", help="explicit values at rationals p/q")
    s.add_argument("--theta", help="comma-separated rationals")
    s.add_argument("--family", choices=["fibonacci", "all"], default="fibonacci")
    s.add_argument("--max-q", type=int, default=89)
    s.add_argument("--midpoint", action="store_true")
    out_flags(s)
    s.set_defaults(func=cmd_upsilon_table)

    s = sub.add_parser("render", help="render J_c and emit a dyadic ball cover")
    s.add_argument("--c", required=True, help="e.g. '0+0i', '-2', '-0.12+0.75i'")
    s.add_argument("--m", type=int, default=6)
    s.add_argument("--resolution", type=int, default=512)
    s.add_argument("--maxiter", type=int, default=500)
    s.add_argument("--refine-depth", type=int, default=3)
    s.add_argument("--viewport", help="xmin,xmax,ymin,ymax (dyadic)")
    s.add_argument("--out", help="image path (.pgm or .ppm)")
    s.add_argument("--image-format", choices=["pgm", "ppm"], default="pgm")
    s.add_argument("--balls", help="ball set output (JSONL)")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--backend", choices=["cython", "numpy"], default=None)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("radius", help="estimate the Siegel disk conformal radius")
    s.add_argument("--cf", required=True)
    s.add_argument("--order", type=int, default=256)
    s.add_argument("--diagnostics", help="CSV of (k, |b_k|^(1/k), running estimate)")
    s.add_argument("--koebe-iter", type=int, default=2000)
    s.add_argument("--midpoint", action="store_true")
    s.add_argument("--backend", choices=["cython", "numpy"], default=None)
    s.set_defaults(func=cmd_radius)

    s = sub.add_parser("hausdorff", help="Hausdorff distance between ball sets")
    s.add_argument("--a", required=True, help="ball set (JSONL)")
    s.add_argument("--b", help="second ball set (JSONL)")
    s.add_argument("--circle", help="cx,cy,r reference circle")
    s.add_argument("--segment", help="ax,ay,bx,by reference segment")
    s.add_argument("--tol", type=float, default=2 ** -16)
    s.set_defaults(func=cmd_hausdorff)
    return p


def _undecidable_types():
    from .brjuno import InfiniteValue
    from .contfrac import ValueUndetermined
    from .dynamics import AZeroError, OrderTooLarge
    from .perturb import DigitBoundExceeded, PrecisionError, WindowMissed
    from .siegel import SmallDivisorError

    return (PrecisionError, DigitBoundExceeded, WindowMissed, AZeroError, SmallDivisorError,
            ValueUndetermined, InfiniteValue, OrderTooLarge)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _undecidable_types() as exc:
        print(f"undecidable: {type(exc).__name__}: {exc}", file=sys.stderr)
        _summary(subcommand=args.subcommand, status="undecidable", error=type(exc).__name__, detail=str(exc))
        return EXIT_UNDECIDABLE
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
