"""Command line front end.

Exit codes: 0 success, 1 usage or parse error, 2 domain error,
3 precision or validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from fractions import Fraction

from . import elementary, functions
from .analytic import default_context, digit_burst_solve
from .errors import PadixError
from .field import (ApproxElement, FractionElement, approx_from_fraction,
                    field_from_json, format_approx, make_field, parse_approx,
                    parse_literal, valuation)
from .recurrence import ODESpec, SystemODESpec, partial_sum_matrix, set_threads, system_partial_sum
from .regsing import regsing_partial_sum


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _field(args):
    if args.field:
        with open(args.field) as fh:
            return field_from_json(json.load(fh))
    if args.p is None:
        raise UsageError("give --p or --field")
    return make_field(args.p)


def _element(K, text, sigma):
    """Parse an input literal; a ``+ O(pi^k)`` suffix makes it approximate."""
    if "O(pi^" in text:
        return parse_approx(K, text)
    v = parse_literal(K, text)
    if isinstance(v, FractionElement):
        return approx_from_fraction(v, sigma)
    return ApproxElement(K, v, sigma)


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _emit(args, value, extra=None):
    if args.output == "json":
        data = {"command": args.command, "sigma": args.sigma, "value": format_approx(value)}
        if extra:
            data.update(extra)
        print(json.dumps(data, sort_keys=True))
    else:
        print(format_approx(value))


def _emit_matrix(args, M):
    rows = [[format_approx(e) for e in row] for row in M.entries]
    if args.output == "json":
        print(json.dumps({"command": args.command, "sigma": args.sigma, "N": M.N,
                          "matrix": rows}, sort_keys=True))
    else:
        for row in rows:
            print(" | ".join(row))


# -- subcommands ------------------------------------------------------------------


def cmd_log(args):
    K = _field(args)
    x = _element(K, args.x, args.sigma)
    _emit(args, elementary.log1m(x, args.sigma))


def cmd_exp(args):
    K = _field(args)
    _emit(args, elementary.exp(_element(K, args.x, args.sigma), args.sigma))


def cmd_pow(args):
    K = _field(args)
    base = _element(K, args.x, args.sigma)
    _emit(args, elementary.pow(base, _rational(args.delta), args.sigma))


def cmd_artin_hasse(args):
    K = _field(args)
    _emit(args, elementary.artin_hasse(_element(K, args.x, args.sigma), args.sigma))


def cmd_polylog(args):
    K = _field(args)
    x = _element(K, args.x, args.sigma)
    _emit(args, functions.polylog(args.s, x, args.sigma))


def cmd_2f1(args):
    K = _field(args)
    params = functions.HypergeomParams(_rational(args.a), _rational(args.b), _rational(args.c))
    x = _element(K, args.x, args.sigma)
    _emit(args, functions.hypergeom_2f1(params, x, args.sigma))


def cmd_dwork(args):
    K = make_field(args.p)
    x = parse_literal(K, args.x)
    init = None
    if args.frobenius_init:
        init = functions.load_frobenius_init(args.frobenius_init, K)
    f0 = _element(K, args.f0, args.sigma) if args.f0 else None
    ctx = functions.DworkContext(args.p, x, init=init, f0=f0, x0_digits=args.x0_digits)
    _emit(args, functions.dwork_log_derivative(ctx, args.sigma, c=args.block))


def _load_ode(K, path):
    with open(path) as fh:
        data = json.load(fh)
    lit = lambda t: parse_literal(K, str(t))
    if "coeffs" in data:
        return ODESpec.from_rational(K, [[lit(c) for c in a] for a in data["coeffs"]])
    if "Q" in data and "P" in data:
        Q = [lit(c) for c in data["Q"]]
        P = [[[lit(c) for c in ent] for ent in row] for row in data["P"]]
        if any(isinstance(c, FractionElement) for c in Q) or \
                any(isinstance(c, FractionElement) for row in P for ent in row for c in ent):
            raise UsageError("system coefficients must be integral")
        return SystemODESpec(K, Q, P)
    raise UsageError("ODE file needs 'coeffs' or 'Q' and 'P'")


def cmd_ode_eval(args):
    K = _field(args)
    ode = _load_ode(K, args.ode)
    point = parse_literal(K, args.point)
    if isinstance(point, FractionElement):
        u, v = point.num, int(point.den)
    else:
        u, v = point, 1
    sigma = args.sigma
    if args.regular_singular:
        if isinstance(ode, SystemODESpec):
            raise UsageError("--regular-singular takes a scalar ODE")
        N = args.N or _auto_N_regsing(ode, u, sigma)
        M = regsing_partial_sum(ode, u, v, N, sigma, formal=args.formal)
    else:
        if args.N:
            if isinstance(ode, SystemODESpec):
                M = system_partial_sum(ode, u, v, args.N, sigma)
            else:
                M = partial_sum_matrix(ode, u, v, args.N, sigma)
        else:
            if v != 1:
                raise UsageError("automatic N needs an integral point; pass --N")
            ctx = default_context(ode, nu=0)
            M = digit_burst_solve(ctx, u, sigma)
    _emit_matrix(args, M)


def _auto_N_regsing(ode, u, sigma):
    import math
    K = ode.K
    vx = valuation(u)
    if vx <= 0:
        raise UsageError("automatic N needs |x| < 1; pass --N")
    growth = lambda n: ode.r * math.log(n, K.p) + 1
    return functions._terms_for_growth(vx, Fraction(sigma, K.e) + ode.r * vx + 2, growth, ode.r)


_BENCH = {
    "log": lambda K, x, s: elementary.log1m(x, s),
    "exp": lambda K, x, s: elementary.exp(x, s),
    "artin-hasse": lambda K, x, s: elementary.artin_hasse(x, s),
    "polylog": lambda K, x, s: functions.polylog(2, x, s),
}


def cmd_bench(args):
    K = _field(args)
    fn = _BENCH[args.function]
    sigmas = [int(s) for s in args.sigmas.split(",")]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["sigma", "seconds"])
    for s in sigmas:
        x = _bench_input(K, args.function, s, args.seed)
        times = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            fn(K, x, s)
            times.append(time.perf_counter() - t0)
        writer.writerow([s, f"{statistics.median(times):.6f}"])


def _bench_input(K, name, sigma, seed):
    import random
    rng = random.Random(seed)
    p = K.p
    low = K.e * (2 if name == "exp" and p == 2 else 1) + (K.e if p == 2 else 0)
    digits = [rng.randrange(p) for _ in range(max(sigma, 1))]
    val = sum(d * p ** i for i, d in enumerate(digits))
    return ApproxElement(K, K.from_int(val * p ** ((low + K.e - 1) // K.e)), sigma)


# -- parser -----------------------------------------------------------------------


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, help="the prime (field Q_p)")
    common.add_argument("--field", help="JSON field specification")
    common.add_argument("--sigma", type=int, default=None, help="target precision O(pi^sigma)")
    common.add_argument("--output", choices=["plain", "json"], default="plain")
    common.add_argument("--threads", type=int, default=None)

    parser = _Parser(prog="padix", description="Exact p-adic function evaluation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, helptext in [("log", cmd_log, "log(1 - x)"), ("exp", cmd_exp, "exp(x)"),
                               ("artin-hasse", cmd_artin_hasse, "Artin-Hasse exponential")]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--x", required=True)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("pow", parents=[common], help="(1 + x)^delta, given the base")
    sp.add_argument("--x", required=True, help="the base 1 + x")
    sp.add_argument("--delta", required=True)
    sp.set_defaults(func=cmd_pow)

    sp = sub.add_parser("polylog", parents=[common], help="Li_s(x)")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--x", required=True)
    sp.set_defaults(func=cmd_polylog)

    sp = sub.add_parser("2f1", parents=[common], help="2F1(a, b; c; x)")
    for k in ("a", "b", "c"):
        sp.add_argument(f"--{k}", required=True)
    sp.add_argument("--x", required=True)
    sp.set_defaults(func=cmd_2f1)

    sp = sub.add_parser("dwork", parents=[common], help="F'/F for F = 2F1(1/2,1/2;1) on |x| = 1")
    sp.add_argument("--x", required=True)
    sp.add_argument("--frobenius-init", help="JSON file with the Frobenius matrix")
    sp.add_argument("--f0", help="value of F'/F at the first burst point instead")
    sp.add_argument("--x0-digits", type=int, default=1)
    sp.add_argument("--block", type=int, default=None, help="first block length")
    sp.set_defaults(func=cmd_dwork)

    sp = sub.add_parser("ode-eval", parents=[common], help="fundamental matrix of an ODE")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--ordinary", action="store_true", default=True)
    mode.add_argument("--regular-singular", action="store_true")
    sp.add_argument("--ode", required=True, help="JSON with 'coeffs' or 'Q'/'P'")
    sp.add_argument("--point", required=True)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--formal", action="store_true", help="allow irregular points")
    sp.set_defaults(func=cmd_ode_eval)

    sp = sub.add_parser("bench", parents=[common], help="CSV of sigma versus time")
    sp.add_argument("--function", choices=sorted(_BENCH), default="log")
    sp.add_argument("--sigmas", default="256,512,1024,2048")
    sp.add_argument("--repeat", type=int, default=3)
    sp.add_argument("--seed", type=int, default=1)
    sp.set_defaults(func=cmd_bench)
    return parser


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command != "bench":
            if args.sigma is None:
                raise UsageError("--sigma is required")
            if args.sigma < 1:
                raise UsageError("--sigma must be at least 1")
        if args.command == "dwork" and args.p is None:
            raise UsageError("dwork needs --p")
        if args.threads is not None:
            set_threads(args.threads)
        args.func(args)
        return 0
    except UsageError as exc:
        print(f"padix: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"padix: error: {exc}", file=sys.stderr)
        return 1
    except PadixError as exc:
        print(f"padix: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
