"""Command-line entry point.

Exit codes: 0 success, 1 a checked criterion failed, 2 usage or input error.
Every JSON report embeds the command configuration, seed and library version.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, dioph
from .acceptance import AcceptanceConfig, run_all
from .curves import trig_test_curve
from .errors import GeometryError, InvalidSchema
from .gauge import gauge_matrix, gauge_residual, kappa_dictionary, lift_realization, solve_gauge
from .io import (InputError, polygon_from_json, polygon_to_json, read_json, schema_from_json,
                 write_csv, write_json)
from .limits import FLAVORS, fit_limit, limit_flavor
from .maps import iterate_schema, pentagram_schema, syst2_schema
from .projective import SmoothLiftedCurve, projective_equivalence
from .psdo import agd_operator, fractional_power, hamiltonian_density, pretty, psdo_root
from .diffpoly import variational_derivative

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NAMED_SCHEMAS = {"pentagram": pentagram_schema, "syst2": syst2_schema}


class UsageError(Exception):
    pass


def _envelope(args, payload):
    config = {k: v for k, v in vars(args).items() if k != "func"}
    return {"version": __version__, "seed": getattr(args, "seed", None),
            "config": config, **payload}


def _emit(args, payload):
    report = _envelope(args, payload)
    if getattr(args, "out", None):
        write_json(args.out, report)
    return report


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _at(seq, i):
    return seq[i] if seq is not None and i < len(seq) else None


def _num(v, fmt=" .8f"):
    return "n/a" if v is None else format(v, fmt)


def _check_out(path):
    if path and not Path(path).resolve().parent.is_dir():
        raise UsageError(f"output directory for {path} does not exist")


# ---------------------------------------------------------------------------
# commands


def cmd_map(args):
    """Iterate a schema map on a polygon read from JSON."""
    _check_out(args.out)
    P = polygon_from_json(read_json(args.polygon))
    if args.schema in NAMED_SCHEMAS:
        S = NAMED_SCHEMAS[args.schema]()
    else:
        S = schema_from_json(read_json(args.schema))
    seq = iterate_schema(P, S, args.iters, normalize=not args.no_normalize)
    payload = {"schema": S.to_json(),
               "polygons": [dict(polygon_to_json(Q), nonliftable=Q.nonliftable,
                                 meta={k: str(v) for k, v in Q.meta.items()}) for Q in seq]}
    status = EXIT_OK
    if args.check_equivalence:
        final = seq[-1]
        best = None
        for s in range(P.period):
            eq = projective_equivalence(final, P.shifted(s), tol=args.tol)
            if eq is not None:
                best = {"equivalent": True, "index_shift": s, "residual": eq.residual,
                        "transform": eq.transform.tolist()}
                break
        payload["equivalence"] = best or {"equivalent": False}
        print(f"equivalent to the input: {bool(best)}"
              + (f" (index shift {best['index_shift']}, residual {best['residual']:.2e})"
                 if best else ""))
        if not best:
            status = EXIT_FAIL
    _emit(args, payload)
    return status


def cmd_limit(args):
    """Measure the eps-expansion of a schema map on a built-in test curve."""
    _check_out(args.out)
    _check_out(args.csv)
    params = {"reach": args.reach} if args.reach else None
    offsets = args.offsets
    if offsets is not None and args.flavor in ("lemma-square", "rp4", "two-subspace"):
        raise UsageError("--offsets applies to seg-hyper and rp3-ansatz; these flavors "
                         "use their built-in triples")
    S, field_, literature, ladder = limit_flavor(args.flavor, args.m, offsets, params)
    curve = SmoothLiftedCurve(trig_test_curve(S.dim, args.curve_variant))
    eps = args.epsilons or ladder
    rep = fit_limit(curve, S, args.x, eps, field=field_, literature=literature)
    print(f"schema {rep.schema} on {rep.curve} at x={rep.x}")
    print(f"fitted order {rep.fitted_order:.4f} (R^2 {rep.r_squared:.6f})")
    names = ["G"] + ["G" + "'" * i for i in range(1, S.dim + 1)]
    for i, name in enumerate(names):
        print(f"  {name:<6} measured {_num(_at(rep.extrapolated_coeffs, i))}"
              f"  predicted {_num(_at(rep.predicted_coeffs, i))}"
              f"  literature {_num(_at(rep.literature_coeffs, i))}")
    print(f"field {field_}")
    print(f"discrepancy {_num(rep.discrepancy, '.2e')}; "
          f"r0 deviation {_num(rep.r0_deviation, '.2e')}")
    _emit(args, {"report": rep.to_json(), "field": str(field_)})
    if args.csv:
        write_csv(args.csv, rep.csv_rows())
    return EXIT_OK


def cmd_search(args):
    """Exhaustive Diophantine searches."""
    _check_out(args.out)
    if args.max_abs < 2:
        raise UsageError("--max-abs must be >= 2")
    if args.kind == "rp3":
        hits = dioph.rp3_search(args.max_abs, args.q, threads=args.threads)
    else:
        hits = dioph.rp4_search(args.max_abs, threads=args.threads, flipped=args.flipped)
    for h in hits:
        print(" ".join(str(t) for t in h.key()))
    print(f"{len(hits)} solutions")
    _emit(args, {"count": len(hits), "results": [h.to_json() for h in hits]})
    return EXIT_OK


def cmd_psdo(args):
    """Root coefficients, residue density and its variational derivative."""
    _check_out(args.out)
    order, r = args.order, args.exponent
    if r.denominator != order:
        raise UsageError(f"exponent denominator must equal the order {order}")
    L = agd_operator(order)
    R = psdo_root(L, order, args.depth)
    ells = {f"l{i}": str(R.coeff(-i)) for i in range(1, (args.depth or order + 2) + 1)}
    P = fractional_power(L, order, r.numerator)
    res = P.residue()
    dk = variational_derivative(res, "k", order - 1)
    print(f"L = {pretty(L)}")
    for k, v in ells.items():
        print(f"{k} = {v}")
    print(f"res L^({r}) = {res}")
    print("delta_k = (" + ", ".join(str(c) for c in dk) + ")")
    _emit(args, {"root": ells, "residue": res.to_json(), "residue_text": str(res),
                 "delta_k": [str(c) for c in dk]})
    return EXIT_OK


def cmd_gauge(args):
    """Gauge matrix, dictionary, residual and lifted realizations."""
    _check_out(args.out)
    n = args.n
    if args.source == "literature":
        g = gauge_matrix(n, "literature")
        d = kappa_dictionary(n, "literature")
    else:
        g, d = solve_gauge(n)
    res = gauge_residual(n, source=args.source)
    lifts = {}
    for r in range(2, n + 1):
        lifts[f"{r}/{n + 1}"] = str(lift_realization(n, hamiltonian_density(n + 1, r),
                                                     source=args.source))
    print(f"g ({args.source}):\n{g.pretty()}")
    for (fam, i), p in sorted(d.items()):
        print(f"{fam}{i} = {p}")
    print(f"residual is zero: {res.is_zero()}")
    for k, v in lifts.items():
        print(f"res L^({k}): {v}")
    _emit(args, {"gauge": g.to_json(), "dictionary": {f"{f}{i}": str(p) for (f, i), p in d.items()},
                 "residual_zero": res.is_zero(), "residual": res.to_json(), "lifts": lifts})
    return EXIT_OK


def cmd_verify_all(args):
    """Run the acceptance suite and write a summary."""
    _check_out(args.out)
    _check_out(args.csv)
    config = AcceptanceConfig(seed=args.seed, threads=args.threads,
                              max_abs_rp4=args.max_abs_rp4, limit_tol=args.limit_tol)
    results = run_all(config, set(args.only) if args.only else None)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria pass"
          + (f"; failed: {failed}" if failed else ""))
    _emit(args, {"criteria": [r.to_json() for r in results], "failed": failed})
    if args.csv:
        rows = [["criterion", "title", "passed", "runtime_s"]]
        rows += [[r.number, r.title, r.passed, f"{r.runtime:.3f}"] for r in results]
        write_csv(args.csv, rows)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="genpentagram", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", help="write a JSON report here")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("map", help="apply a schema map to a polygon")
    sp.add_argument("--polygon", required=True, help="polygon JSON file")
    sp.add_argument("--schema", required=True,
                    help="schema JSON file or a built-in name (pentagram, syst2)")
    sp.add_argument("--iters", type=int, default=1)
    sp.add_argument("--check-equivalence", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--no-normalize", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_map)

    sp = sub.add_parser("limit", help="measure a continuous limit")
    sp.add_argument("--flavor", choices=FLAVORS, required=True)
    sp.add_argument("--m", type=int, help="dimension (seg-hyper)")
    sp.add_argument("--offsets", type=_int_list,
                    help="hyperplane offsets (seg-hyper) or a,b,c (rp3-ansatz)")
    sp.add_argument("--reach", type=int, help="segment reach r for seg-hyper")
    sp.add_argument("--epsilons", type=_float_list)
    sp.add_argument("--x", type=float, default=0.3)
    sp.add_argument("--curve-variant", type=int, default=0)
    sp.add_argument("--csv", help="write a CSV table here")
    common(sp)
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("search", help="Diophantine searches")
    sp.add_argument("kind", choices=("rp3", "rp4"))
    sp.add_argument("--max-abs", type=int, required=True)
    sp.add_argument("--q", type=_fraction, default=Fraction(1, 8), help="rp3 target q")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--flipped", action="store_true",
                    help="rp4: use 20 det_x = +9 det_m instead of -9")
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("psdo", help="fractional powers and residues")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--exponent", type=_fraction, required=True)
    sp.add_argument("--depth", type=int)
    common(sp)
    sp.set_defaults(func=cmd_psdo)

    sp = sub.add_parser("gauge", help="gauge data and lifted realizations")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--source", choices=("literature", "derived"), default="literature")
    common(sp)
    sp.set_defaults(func=cmd_gauge)

    sp = sub.add_parser("verify-all", help="run the acceptance suite")
    sp.add_argument("--threads", type=int, default=4)
    sp.add_argument("--max-abs-rp4", type=int, default=7)
    sp.add_argument("--limit-tol", type=float, help="override every limit-fit tolerance")
    sp.add_argument("--only", type=_int_list, help="comma-separated criterion numbers")
    sp.add_argument("--csv")
    common(sp)
    sp.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InputError, InvalidSchema) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
