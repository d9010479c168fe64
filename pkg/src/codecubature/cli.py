"""Command-line interface: generate, verify, oa, quad, bounds.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 construction infeasible.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import arrays, builder, quad1d
from .arrays import BudgetExceeded, OAError
from .fileformat import FormatError, emit, parse, parse_generator, read, write_atomic
from .moments import REGIONS, MeasureSpec
from .verify import (
    EXHAUSTIVE_TOL,
    SAMPLED_TOL,
    certify_formula,
    verify_exhaustive,
    verify_sampled,
    verify_structural,
    VerificationError,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3

COVERAGE = """\
supported combinations:
  cube, cubical-shell      any degree t >= 1
  gaussian                 odd t >= 3 (t = 5, n >= 6 uses the axis/vertex formula)
  sphere, ball,            odd t >= 3 (t = 5, n >= 6 uses the axis/vertex formula)
  spherical-shell, radial-exponential
  simplex                  t = 3: 3n-1 point Hadamard formula; other t: orthant thinning
  cross-polytope           any t >= 1 (numerically verified)
  exponential-orthant      any t >= 1
For the simplex, --dim counts barycentric coordinates."""


class UsageError(Exception):
    pass


def _build(args):
    region, n, t = args.region, args.dim, args.degree
    fam = args.array_family
    q = args.q
    if n < 1 or t < 1:
        raise UsageError("--dim and --degree must be positive")
    if region == "cube":
        return builder.build_cube(n, t, fam)
    if region == "cubical-shell":
        return builder.build_cubical_shell(n, t, _shell_r(args), fam)
    if region == "exponential-orthant":
        return builder.build_orthant(n, t, q, fam)
    if region == "simplex":
        if n < 2:
            raise UsageError("the simplex needs at least 2 barycentric coordinates")
        if t == 3 and q is None:
            return builder.build_simplex3(n)
        return builder.build_simplex(n - 1, t, q, fam)
    if region == "cross-polytope":
        return builder.build_cross_polytope(n, t, q, fam)
    if t % 2 == 0:
        raise UsageError(f"{region} formulas are built for odd degrees only\n{COVERAGE}")
    if t == 1:
        raise UsageError(f"{region} needs t >= 3\n{COVERAGE}")
    use5 = t == 5 and n >= 6 and q is None and fam in ("auto", "kerdock")
    if region == "gaussian":
        return builder.build_sphere5(n, "gaussian") if use5 else builder.build_gaussian(n, t, q, fam)
    if region == "sphere":
        return builder.build_sphere5(n, "sphere") if use5 else builder.build_sphere(n, t, q, fam)
    if region in ("ball", "spherical-shell", "radial-exponential"):
        r = _shell_r(args) if region == "spherical-shell" else None
        if use5:
            return builder.build_sphere5(n, region, r)
        return builder.build_radial(MeasureSpec(region, n, r), t, q, fam)
    raise UsageError(f"unknown region {region!r}")


def _shell_r(args):
    if args.shell_r is None:
        raise UsageError(f"--shell-r is required for {args.region}")
    return Fraction(args.shell_r)


def _generator_params(args, formula) -> dict:
    prov = formula.provenance
    out = {"region": args.region, "dim": args.dim, "degree": args.degree,
           "array-family": args.array_family}
    out["requested-q"] = "none" if args.q is None else args.q
    if args.shell_r is not None:
        out["shell-r"] = args.shell_r
    for key in ("construction", "family", "q", "m", "s", "k", "case", "order", "array", "array-rows"):
        if key in prov and key not in out:
            out[key] = prov[key]
    out["seed"] = args.seed
    return out


def cmd_generate(args) -> int:
    formula = _build(args)
    certs = certify_formula(formula, args.strategy, args.tol, args.count, args.seed)
    text = emit(formula, certs, _generator_params(args, formula))
    # the file must round-trip and re-verify before success is reported
    back = parse(text)
    if not (np.array_equal(back.points, formula.points) and np.array_equal(back.weights, formula.weights)):
        print("error: emitted file does not round-trip", file=sys.stderr)
        return EXIT_FAIL
    reparsed = back.formula()
    for c in certs:
        if c.strategy == "exhaustive":
            again = verify_exhaustive(reparsed, c.degree, c.tolerance)
        elif c.strategy == "sampled":
            again = verify_sampled(reparsed, c.degree, c.tolerance, c.count, c.seed)
        else:
            again = c  # structural: the formula's points were checked against the record
        if not again.passes:
            print(f"error: re-verification failed: {again.summary()}", file=sys.stderr)
            return EXIT_FAIL
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    out = sys.stderr if not args.out else sys.stdout
    print(f"points: {formula.size}", file=out)
    for c in certs:
        print(f"certificate: {c.summary()}", file=out)
        if c.detail:
            print(f"  {c.detail}", file=out)
    return EXIT_OK if all(c.passes for c in certs) else EXIT_FAIL


def _rebuild_from_header(ff) -> object:
    gen = parse_generator(ff.header.get("generator", ""))
    ns = argparse.Namespace(
        region=gen.get("region", ff.header["region"]),
        dim=int(gen.get("dim", ff.header["dimension"])),
        degree=int(gen.get("degree", ff.header["degree"])),
        array_family=gen.get("array-family", "auto"),
        q=None if gen.get("requested-q", "none") == "none" else int(gen["requested-q"]),
        shell_r=gen.get("shell-r"),
        seed=int(gen.get("seed", 0)),
    )
    return _build(ns)


def cmd_verify(args) -> int:
    ff = read(args.path)
    formula = ff.formula()
    if args.degree is not None:
        formula = formula.with_degree(args.degree)
    strategy = args.strategy
    if strategy == "embedded":
        strategies = [s for s in ff.header["strategy"].split("+") if s != "none"] or ["auto"]
    else:
        strategies = [strategy]
    certs = []
    for strat in strategies:
        if strat == "structural":
            built = _rebuild_from_header(ff)
            if not (np.array_equal(built.points, formula.points) and np.array_equal(built.weights, formula.weights)):
                print("structural: file does not match its recorded construction", file=sys.stderr)
                return EXIT_FAIL
            certs.append(verify_structural(built, formula.degree))
        elif strat == "exhaustive":
            certs.append(verify_exhaustive(formula, formula.degree, args.tol or EXHAUSTIVE_TOL))
        elif strat == "sampled":
            certs.append(verify_sampled(formula, formula.degree, args.tol or SAMPLED_TOL, args.count, args.seed))
        else:
            certs.extend(certify_formula(formula, "auto", args.tol, args.count, args.seed))
    for c in certs:
        print(c.summary())
        if not c.passes:
            if c.worst:
                print(f"violating monomial: {c.worst_monomial}")
            if c.detail:
                print(c.detail)
    return EXIT_OK if all(c.passes for c in certs) else EXIT_FAIL


def cmd_oa(args) -> int:
    fam = args.family
    if fam == "bch":
        arr = arrays.bch_dual_array(args.q, args.m, args.strength, verify=args.verify_mode)
    elif fam == "kerdock":
        if args.q != 2:
            raise UsageError("Kerdock arrays are binary")
        if args.strength > 5:
            raise UsageError("Kerdock arrays have strength 5")
        arr = arrays.kerdock_array(args.m, verify=args.verify_mode)
    elif fam == "hadamard":
        if args.q != 2:
            raise UsageError("Hadamard arrays are binary")
        arr = arrays.hadamard_to_oa(arrays.hadamard_matrix(args.order or 2**args.m))
    else:
        raise UsageError(f"unknown family {fam!r}")
    if arr.strength is None or arr.strength < min(args.strength, arr.length):
        # verify the requested strength explicitly when the builder did not
        arr = arrays.certify(arr, min(args.strength, arr.length), mode=args.verify_mode if args.verify_mode != "none" else "auto")
    out = [f"{arr.q} {arr.length} {arr.size} {arr.strength}"]
    sym = "0123456789abcdefghijklmnopqrstuvwxyz"
    if arr.q > len(sym):
        out += [" ".join(str(int(v)) for v in row) for row in arr.rows]
    else:
        out += ["".join(sym[v] for v in row) for row in arr.rows]
    sys.stdout.write("\n".join(out) + "\n")
    print(f"verified strength {arr.strength} ({arr.notes.get('strength_check', 'construction')})", file=sys.stderr)
    return EXIT_OK


def cmd_quad(args) -> int:
    kind = args.kind
    if kind == "convolutional":
        rule = quad1d.convolutional_chebyshev(args.s)
    elif kind == "gauss2":
        rule = quad1d.gauss_2point_uniform()
    elif kind == "exp2":
        rule = quad1d.exp_ray_2point()
    elif kind == "equal-weight":
        if args.measure is None or args.q is None or args.t is None:
            raise UsageError("equal-weight needs --measure, --q and --t")
        rule = quad1d.equal_weight_find(args.measure, args.q, args.t)
    elif kind == "gauss-moments":
        if not args.moments or args.r is None:
            raise UsageError("gauss-moments needs --moments and --r")
        rule = quad1d.gauss_from_moments([Fraction(m) for m in args.moments.split(",")], args.r)
    else:
        raise UsageError(f"unknown kind {kind!r}")
    lines = [f"measure: {rule.measure}", f"degree: {rule.degree}", f"points: {rule.size}"]
    if rule.pairs is not None:
        lines.append("pairs: " + " ".join(repr(float(z)) for z in rule.pairs))
    lines.append("end-header")
    lines += [f"{float(w)!r} {float(p)!r}" for w, p in zip(rule.weights, rule.points)]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bounds(args) -> int:
    b = builder.bounds(args.dim, args.degree, args.symmetric)
    for k, v in b.items():
        print(f"{k}: {v}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="codecubature", description="Cubature formulas thinned by orthogonal arrays.",
                                epilog=COVERAGE, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build, verify and write a formula")
    g.add_argument("--region", required=True, choices=REGIONS)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--degree", type=int, required=True)
    g.add_argument("--q", type=int)
    g.add_argument("--array-family", default="auto", choices=builder.FAMILIES)
    g.add_argument("--shell-r")
    g.add_argument("-o", "--out")
    g.add_argument("--strategy", default="auto", choices=("auto", "exhaustive", "sampled", "structural"))
    g.add_argument("--tol", type=float)
    g.add_argument("--count", type=int, default=10_000)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="check a formula file")
    v.add_argument("path")
    v.add_argument("--strategy", default="embedded",
                   choices=("embedded", "auto", "exhaustive", "sampled", "structural"))
    v.add_argument("--degree", type=int, help="override the claimed degree")
    v.add_argument("--tol", type=float)
    v.add_argument("--count", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oa", help="build and print an orthogonal array")
    o.add_argument("--q", type=int, default=2)
    o.add_argument("--m", type=int, required=True)
    o.add_argument("--strength", type=int, required=True)
    o.add_argument("--family", default="bch", choices=("bch", "kerdock", "hadamard"))
    o.add_argument("--order", type=int, help="Hadamard order (default 2^m)")
    o.add_argument("--verify-mode", default="auto", choices=("auto", "exhaustive", "sampled"))
    o.set_defaults(func=cmd_oa)

    qd = sub.add_parser("quad", help="print a one-dimensional rule")
    qd.add_argument("--kind", required=True, choices=("convolutional", "gauss2", "exp2", "equal-weight", "gauss-moments"))
    qd.add_argument("--s", type=int, default=2)
    qd.add_argument("--measure", choices=("gaussian", "exponential"))
    qd.add_argument("--q", type=int)
    qd.add_argument("--t", type=int)
    qd.add_argument("--moments", help="comma-separated m_0,...,m_{2r-1} (fractions allowed)")
    qd.add_argument("--r", type=int)
    qd.set_defaults(func=cmd_quad)

    b = sub.add_parser("bounds", help="reference point counts")
    b.add_argument("--dim", type=int, required=True)
    b.add_argument("--degree", type=int, required=True)
    b.add_argument("--symmetric", action="store_true")
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (builder.Infeasible, quad1d.NoSolution) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (builder.BuildError, OAError, VerificationError, quad1d.QuadratureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
