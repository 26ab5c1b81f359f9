"""Command-line entry point: ``hilbsam <command> ...``.

Exit codes: 0 success, 1 property failure, 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .exact import DEFAULT_PRECISION, ExtReal, format_rational, parse_rational
from .invariants import chi_sequence, estimate_invariant, parse_metric_spec
from .monomial import (
    GroebnerBudget,
    HomogeneousIdeal,
    ResourceError,
    dimension_oracle,
    format_polynomial,
    groebner_basis,
    hilbert_function,
    hilbert_polynomial,
    iterate_deformation,
    leading_ideal,
    parse_ideal,
    weight_initial_ideal,
)
from .superadd import fekete_estimate, transport_matrix

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    if path in ("zero", "0"):
        return ""
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_ideal(args) -> HomogeneousIdeal:
    text = _read_text(args.ideal)
    if args.vars is None and args.ideal in ("zero", "0"):
        raise UsageError("the zero ideal needs --vars")
    try:
        return parse_ideal(text, num_vars=args.vars)
    except ValueError as exc:
        raise UsageError(f"bad ideal: {exc}") from exc


def _load_spec(path: str):
    try:
        return parse_metric_spec(json.loads(_read_text(path)))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad spec: {exc}") from exc


def _budget(args) -> GroebnerBudget:
    return GroebnerBudget(max_basis=args.max_basis, max_degree=args.max_degree)


def _fmt_ext(x: ExtReal) -> str:
    return f"{float(x):.15g}" if x.is_finite else x.tag


def _out(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_hilbert(args) -> int:
    I = _load_ideal(args)
    J = I.to_monomial() if I.is_monomial() else leading_ideal(groebner_basis(I, None, _budget(args)), None)
    lines = ["n,H"] + [f"{n},{hilbert_function(J, n)}" for n in range(args.nmax + 1)]
    if args.poly:
        coeffs, n0 = hilbert_polynomial(J)
        lines.append(f"# Hilbert polynomial: {format_polynomial(coeffs)} for n >= {n0}")
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _invariance(I, J_text_ideal, degree):
    lead = leading_ideal(groebner_basis(J_text_ideal, None), None)
    return all(hilbert_function(lead, n) == dimension_oracle(I, n) for n in range(degree + 1))


def cmd_deform(args) -> int:
    I = _load_ideal(args)
    budget = _budget(args)
    lines = []
    if args.iterate:
        M, trace = iterate_deformation(I, budget)
        for step, ideal in enumerate(trace, start=1):
            lines.append(f"# step {step}")
            lines.append(ideal.to_text() or "zero")
        final = trace[-1] if trace else I
        lines.append("# monomial ideal")
        lines.append(M.to_text(list(final.var_names)) or "zero")
        ok = _invariance(I, HomogeneousIdeal.from_monomial(M), args.check_degree)
    else:
        if args.var is None or not 0 <= args.var < I.num_vars:
            raise UsageError(f"--var must be in 0..{I.num_vars - 1}")
        W = weight_initial_ideal(I, args.var, budget)
        lines.append(f"# weight-initial ideal along {I.var_names[args.var]} (renamed {W.var_names[args.var]})")
        lines.append(W.to_text() or "zero")
        ok = _invariance(I, W, args.check_degree)
    lines.append(f"hilbert-invariance (degrees <= {args.check_degree}): {'OK' if ok else 'FAILED'}")
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_chi(args) -> int:
    spec = _load_spec(args.spec)
    rows = ["n,chi,error_bound"]
    for n, c in chi_sequence(spec, args.n, args.precision):
        rows.append(f"{n},{_fmt_ext(c)},{float(c.rad) if c.is_finite else 0:.3g}")
    _out(args, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_invariant(args) -> int:
    spec = _load_spec(args.spec)
    try:
        est = estimate_invariant(spec, args.r, args.jmax, args.nmax, parse_rational(args.tol), args.precision)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(est.to_csv())
    _out(args, est.to_json() + "\n")
    return EXIT_OK


def cmd_fekete(args) -> int:
    values = []
    for tok in _read_text(args.series).split():
        try:
            values.append(parse_rational(tok))
        except ValueError as exc:
            raise UsageError(f"bad series value {tok!r}") from exc
    N = args.N or len(values)
    if N > len(values) or N < 1:
        raise UsageError(f"series has {len(values)} terms, N = {N}")
    est = fekete_estimate(values, N)
    out = {
        "certified_lower": _fmt_ext(est.certified_lower),
        "point_estimate": _fmt_ext(est.point_estimate),
        "argmax": est.argmax,
        "n_used": est.n_used,
        "diverges": est.diverges,
    }
    _out(args, json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_transport(args) -> int:
    if min(args.n, args.m) < 0 or args.r < 1:
        raise UsageError("need n, m >= 0 and r >= 1")
    T = transport_matrix(args.n, args.m, args.r)
    lines = ["[" + ", ".join(format_rational(x) for x in row) + "]" for row in T.entries]
    verdicts = T.check()
    failed = [k for k, ok in verdicts.items() if not ok]
    lines.append("constraints: OK" if not failed else "constraints: FAILED (" + ", ".join(failed) + ")")
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK if not failed else EXIT_FAIL


def _run_check(item):
    from .verify import _timed

    key, title, fn, seed = item
    return _timed(key, title, fn, seed)


def cmd_verify_all(args) -> int:
    from .verify import ACCEPTANCE, EXTRA

    items = [(k, t, f, args.seed) for k, t, f in ACCEPTANCE + EXTRA]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_run_check, items))  # map keeps the submission order
    else:
        results = []
        for item in items:
            results.append(_run_check(item))
    failed = 0
    for res in results:
        print(res.line(timings=args.timings), flush=True)
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="working precision in bits (>= 32)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--threads", type=int, default=1, help="worker processes for independent checks")
    common.add_argument("--max-degree", type=int, default=40, help="Gröbner degree budget")
    common.add_argument("--max-basis", type=int, default=400, help="Gröbner basis size budget")
    common.add_argument("-o", "--output", help="write the result here instead of stdout")

    p = argparse.ArgumentParser(prog="hilbsam", description="Desk-scale arithmetic Hilbert-Samuel toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hilbert", parents=[common], help="Hilbert function table of S/I")
    h.add_argument("--ideal", required=True, help="ideal file, '-' for stdin, or 'zero'")
    h.add_argument("--vars", type=int, help="number of variables (needed for the zero ideal)")
    h.add_argument("--nmax", type=int, default=10)
    h.add_argument("--poly", action="store_true", help="also print the Hilbert polynomial")
    h.set_defaults(func=cmd_hilbert)

    d = sub.add_parser("deform", parents=[common], help="fiber at infinity of the cone deformation")
    d.add_argument("--ideal", required=True)
    d.add_argument("--vars", type=int)
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--var", type=int, help="distinguished variable index")
    g.add_argument("--iterate", action="store_true", help="deform along every variable until monomial")
    d.add_argument("--check-degree", type=int, default=10)
    d.set_defaults(func=cmd_deform)

    c = sub.add_parser("chi", parents=[common], help="chi-hat table of a metric spec")
    c.add_argument("--spec", required=True)
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_chi)

    i = sub.add_parser("invariant", parents=[common], help="estimate the arithmetic Hilbert invariants")
    i.add_argument("--spec", required=True)
    i.add_argument("--r", type=int)
    i.add_argument("--jmax", type=int, default=8)
    i.add_argument("--nmax", type=int, default=200)
    i.add_argument("--tol", default="1/100", help="j-stabilization tolerance")
    i.add_argument("--csv", help="write the per-(j, n) table here")
    i.set_defaults(func=cmd_invariant)

    f = sub.add_parser("fekete", parents=[common], help="Fekete estimate of a superadditive series")
    f.add_argument("--series", required=True, help="whitespace-separated a(1), a(2), ...")
    f.add_argument("--N", type=int)
    f.set_defaults(func=cmd_fekete)

    t = sub.add_parser("transport", parents=[common], help="exact transport matrix")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--m", type=int, required=True)
    t.add_argument("--r", type=int, required=True)
    t.set_defaults(func=cmd_transport)

    v = sub.add_parser("verify-all", parents=[common], help="run the full exact property suite")
    v.add_argument("--timings", action="store_true", help="append wall-clock times (breaks bit-identity)")
    v.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision < 32:
        parser.error("--precision must be >= 32")
    if args.threads < 1 or args.max_degree < 1 or args.max_basis < 1:
        parser.error("--threads and budgets must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hilbsam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"hilbsam: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
