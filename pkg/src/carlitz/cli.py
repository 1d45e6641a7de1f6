"""Command line interface.

Subcommands: ``zeta``, ``units``, ``classmodule``, ``verify``.  Exit codes:
0 for a consistent or exact pass, 1 when a verification finds an
inconsistency (that is a result, printed loudly), 2 for computation
failures of any kind.
"""

import argparse
import json
import sys

from .cache import Cache, NullCache
from .errors import CarlitzError
from .laurent import format_series
from .poly import format_poly
from .textio import describe_field, make_field, series_to_json


def _field_args(sp):
    sp.add_argument("--q", type=int, required=True, help="size of the scalar field")
    sp.add_argument("--modulus", help="torsion modulus f (cyclotomic mode)")
    sp.add_argument("--min-poly", dest="min_poly", help="defining polynomial in x")
    sp.add_argument("--prec", type=int, default=20, help="series precision N")
    sp.add_argument("--json", dest="json_path", help="write a JSON report here")
    sp.add_argument("--cache-dir", help="content-addressed cache directory")
    sp.add_argument("--no-cache", action="store_true", help="bypass the cache")
    sp.add_argument("--degree-bound", type=int, default=1)
    sp.add_argument("--window", type=int, default=None)


def _build(args):
    return make_field(args.q, args.modulus, args.min_poly)


def _cache(args):
    if args.no_cache or not args.cache_dir:
        return NullCache()
    return Cache(args.cache_dir)


def _write_json(args, payload):
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")


def cmd_zeta(args):
    from .zeta import zeta_value

    F = _build(args)
    res = zeta_value(F, args.prec)
    print(format_series(res.series))
    _write_json(
        args,
        {
            "field": describe_field(F),
            "zeta": series_to_json(res.series),
            "route": res.route,
            "prime_audit": {str(k): v for k, v in res.prime_audit.items()},
            "warnings": res.warnings,
        },
    )
    for w in res.warnings:
        print("warning:", w, file=sys.stderr)
    return 0


def cmd_units(args):
    from .classmod import class_module
    from .expmap import exp_coefficients
    from .lattice import integral_preimage_lattice, regulator, saturate, unit_module
    from .verify import _module_of, _plan_precision
    from .windows import WindowContext

    F = _build(args)
    prec = _plan_precision(F, args.prec)
    ctx = WindowContext(F, exp_coeffs=exp_coefficients(_module_of(F), 4), prec=prec)
    cm = class_module(ctx)
    lat = integral_preimage_lattice(
        ctx, degree_bound=args.degree_bound, window=args.window, prec=prec
    )
    lat, _ = saturate(lat, ctx, cm.dim, prec=prec)
    reg = regulator(lat, ctx)
    um = unit_module(lat, ctx)
    print(f"lattice rank {lat.rank}, v(Reg) = {reg.valuation}")
    print("regulator =", format_series(reg.regulator.truncate(reg.valuation + min(10, args.prec))))
    print(f"unit module: rank {um.rank}, torsion " +
          (", ".join(format_poly(f) for f in um.torsion_invariants) or "trivial"))
    for gens in um.gens:
        print("  generator:", ", ".join(format_poly(g) for g in gens))
    _write_json(
        args,
        {
            "field": describe_field(F),
            "regulator": series_to_json(reg.regulator),
            "lattice_rank": lat.rank,
            "unit_rank": um.rank,
            "torsion_invariants": [format_poly(f) for f in um.torsion_invariants],
        },
    )
    return 0


def cmd_classmodule(args):
    from .classmod import class_module
    from .expmap import exp_coefficients
    from .verify import _module_of, _plan_precision
    from .windows import WindowContext

    F = _build(args)
    prec = _plan_precision(F, args.prec)
    ctx = WindowContext(F, exp_coeffs=exp_coefficients(_module_of(F), 4), prec=prec)
    cm = class_module(ctx)
    print(f"dim H = {cm.dim}")
    print(f"|H| = {format_poly(cm.fitting)}")
    _write_json(
        args,
        {
            "field": describe_field(F),
            "dim": cm.dim,
            "fitting": format_poly(cm.fitting),
            "audit": cm.audit,
        },
    )
    return 0


def cmd_verify(args):
    from .verify import verify

    F = _build(args)
    report = verify(
        F,
        args.prec,
        degree_bound=args.degree_bound,
        window=args.window,
        cache=_cache(args),
    )
    print(report.summary())
    _write_json(args, report.data)
    if not report.exact_ok:
        print("VALUATION THEOREM CHECK FAILED", file=sys.stderr)
        return 1
    if not report.consistent:
        print("INCONSISTENCY FOUND:", report.data["verdicts"]["conjecture"], file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="carlitz",
        description="zeta values, unit lattices and class modules of Carlitz cyclotomic fields",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("zeta", cmd_zeta),
        ("units", cmd_units),
        ("classmodule", cmd_classmodule),
        ("verify", cmd_verify),
    ):
        sp = sub.add_parser(name)
        _field_args(sp)
        sp.set_defaults(fn=fn)
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CarlitzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
