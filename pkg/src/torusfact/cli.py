"""Command-line front end.

Exit codes: 0 success, 1 bad input (flags, files, documents), 2 the input is
too close to singular or the certificate is inconclusive, 3 any other
numerical failure. Failures print a JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import errors
from .circle import mean_motion, regularize, wh_factorize
from .document import load_document, read_samples, serialize, write_samples
from .grid import evaluate
from .invariants import InFactorSubgroup, component_descriptor, obstruction_certificate
from .polymat import MatrixPolynomial
from .scalar import ROUNDING_GAP, scalar_factorize
from .toeplitz import toeplitz_indices_oracle
from .witness import build_witness, witness_series

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SINGULAR = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("UsageError", message, EXIT_INPUT)
        raise SystemExit(EXIT_INPUT)


def _emit_error(kind, message, code):
    record = {"error": kind, "message": message, "exit_code": code}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _digest(paths):
    h = hashlib.sha256()
    for p in paths:
        with open(p, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


def _doc(a):
    return json.loads(serialize(a))


def _input_series(args):
    a = load_document(args.input)
    return a, [args.input]


def _input_samples(args):
    if args.samples:
        return read_samples(args.samples), [args.samples], None
    if not args.input:
        raise errors.MalformedField("one of --input or --samples is required")
    a = load_document(args.input)
    if a.dim != 3:
        raise errors.DimensionMismatch(f"{args.input}: expected a series on T^3, got k = {a.dim}")
    return evaluate(a, args.grid), [args.input], args.grid


def cmd_factor(args):
    a, paths = _input_series(args)
    if a.dim != 1:
        raise errors.DimensionMismatch(f"factor works on T^1, got k = {a.dim}")
    res = wh_factorize(a, grid=args.grid, tol=args.tol, margin=args.margin)
    mm = mean_motion(a, margin=args.margin)
    out = {"kappa": list(res.kappa), "mean_motion": mm, "residual": res.residual,
           "check_grid": res.grid, "A_minus": _doc(res.A_minus), "A_plus": _doc(res.A_plus)}
    text = [f"kappa = {tuple(res.kappa)}", f"mean motion = {mm}",
            f"residual = {res.residual:.3e} on {res.grid} nodes (tol {args.tol:g})"]
    return paths, {"tol": args.tol, "margin": args.margin, "grid": args.grid}, out, text


def cmd_factor_scalar(args):
    a, paths = _input_series(args)
    if a.n != 1:
        raise errors.DimensionMismatch(f"factor-scalar needs a 1 x 1 document, got n = {a.n}")
    s = a.entry(0, 0)
    res = scalar_factorize(s, grid=args.grid, tol=args.tol, margin=args.margin)
    parts = {name: _doc(getattr(res, name)) for name in ("b_minus", "u_minus", "b_plus", "u_plus")}
    out = {"c": list(res.c), "residual": res.residual, "check_grid": list(res.grid), **parts}
    text = [f"c = {tuple(res.c)}",
            f"residual = {res.residual:.3e} on grid {res.grid} (tol {args.tol:g})"]
    return paths, {"tol": args.tol, "margin": args.margin, "grid": args.grid}, out, text


def _descriptor_out(d):
    return {"m": d.m, "w": list(d.w), "raw_degree": d.raw, "rounding_gap": abs(d.raw - d.m),
            "min_singular_value": d.margin, "grid": list(d.grid)}


def cmd_invariants(args):
    X, paths, _ = _input_samples(args)
    d = component_descriptor(X, margin=args.margin, gap=args.gap)
    text = [f"descriptor (m, w) = {d.key()}",
            f"raw degree = {d.raw:.6f} (gap {abs(d.raw - d.m):.2e}, allowed {args.gap})",
            f"min singular value = {d.margin:.4g} on grid {d.grid}"]
    return paths, {"margin": args.margin, "gap": args.gap, "grid": args.grid}, _descriptor_out(d), text


def cmd_certify(args):
    X, paths, _ = _input_samples(args)
    cert = obstruction_certificate(X, margin=args.margin, gap=args.gap)
    d = cert.descriptor
    if isinstance(cert.verdict, InFactorSubgroup):
        verdict = {"kind": "InFactorSubgroup", "j": list(cert.verdict.j)}
        line = f"verdict: InFactorSubgroup({tuple(cert.verdict.j)})"
    else:
        verdict = {"kind": "Obstructed", "m": cert.verdict.m}
        line = f"verdict: Obstructed({cert.verdict.m})"
    out = {"verdict": verdict, "descriptor": _descriptor_out(d)}
    text = [line, f"descriptor (m, w) = {d.key()}, raw degree {d.raw:.6f}"]
    return paths, {"margin": args.margin, "gap": args.gap, "grid": args.grid}, out, text


def cmd_witness(args):
    if args.n < 2:
        raise errors.DimensionMismatch("--n must be at least 2")
    degree = args.degree if args.degree is not None else (args.grid - 1) // 2
    approx = witness_series(args.n, args.m, degree, args.grid, kernel=args.kernel)
    if args.out_doc:
        with open(args.out_doc, "w", encoding="utf-8") as fh:
            fh.write(serialize(approx.series))
    if args.samples_out:
        write_samples(args.samples_out, build_witness(args.n, args.m, args.grid))
    out = {"n": args.n, "m": args.m, "degree": degree, "kernel": args.kernel,
           "grid": list(approx.grid), "sup_error": approx.sup_error,
           "offgrid_error": approx.offgrid_error, "min_singular_value": approx.min_singular,
           "offgrid_min_singular_value": approx.offgrid_min_singular,
           "terms": len(approx.series.coeffs)}
    text = [f"witness n={args.n} m={args.m}: degree {degree} {args.kernel} approximant on {approx.grid}",
            f"sup-error {approx.sup_error:.4f} on grid, {approx.offgrid_error:.4f} at cell centres",
            f"min singular value {approx.min_singular:.4f} on grid"]
    params = {"grid": args.grid, "degree": degree, "kernel": args.kernel}
    return [], params, out, text


def cmd_oracle(args):
    a, paths = _input_series(args)
    kappa = toeplitz_indices_oracle(a, sections=args.sections)
    return paths, {"sections": args.sections}, {"kappa": list(kappa)}, [f"kappa = {kappa}"]


def cmd_regularize(args):
    a, paths = _input_series(args)
    if a.dim != 1:
        raise errors.DimensionMismatch(f"regularize works on T^1, got k = {a.dim}")
    shift, P = MatrixPolynomial.from_series(a)
    reg = regularize(P, args.eps)
    result = reg.polynomial.to_series(shift)
    if args.out_doc:
        with open(args.out_doc, "w", encoding="utf-8") as fh:
            fh.write(serialize(result))
    out = {"method": reg.method, "perturbation": reg.perturbation, "det_margin": reg.margin,
           "degree": reg.polynomial.degree, "degree_bound": reg.degree_bound,
           "polynomial": _doc(result)}
    text = [f"method {reg.method}: perturbation {reg.perturbation:.3e} (eps {args.eps:g})",
            f"min |det| on 1024 nodes = {reg.margin:.3e}",
            f"degree {reg.polynomial.degree} (bound {reg.degree_bound})"]
    return paths, {"eps": args.eps}, out, text


def build_parser():
    p = _Parser(prog="torusfact", description="Matrix factorization and component invariants on tori.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out_flag="--out"):
        sp.add_argument(out_flag, dest="out", default=None, help="write the JSON result here")
        return sp

    f = common(sub.add_parser("factor", help="Wiener-Hopf factorization on T^1"))
    f.add_argument("--input", required=True)
    f.add_argument("--grid", type=int, default=None, help="verification grid (default: automatic)")
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--margin", type=float, default=1e-8, help="distance of det zeros from |z| = 1")
    f.set_defaults(run=cmd_factor)

    s = common(sub.add_parser("factor-scalar", help="scalar factorization on T^k"))
    s.add_argument("--input", required=True)
    s.add_argument("--grid", type=int, default=16)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--margin", type=float, default=1e-6)
    s.set_defaults(run=cmd_factor_scalar)

    for name, run, helptext in (("invariants", cmd_invariants, "component descriptor on T^3"),
                                ("certify", cmd_certify, "obstruction certificate on T^3")):
        sp = common(sub.add_parser(name, help=helptext))
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="series document on T^3")
        src.add_argument("--samples", help="binary sample dump")
        sp.add_argument("--grid", type=int, default=32, help="evaluation grid for --input")
        sp.add_argument("--margin", type=float, default=1e-6)
        sp.add_argument("--gap", type=float, default=ROUNDING_GAP)
        sp.set_defaults(run=run)

    w = sub.add_parser("witness", help="trigonometric approximant of the witness")
    w.add_argument("--n", type=int, default=2)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--grid", type=int, default=32)
    w.add_argument("--degree", type=int, default=None, help="default: (grid - 1) // 2")
    w.add_argument("--kernel", choices=("fejer", "dirichlet"), default="fejer")
    w.add_argument("--out", dest="out_doc", default=None, help="series document of the approximant")
    w.add_argument("--samples-out", default=None, help="binary dump of the exact witness samples")
    w.add_argument("--report", dest="out", default=None, help="write the JSON result here")
    w.set_defaults(run=cmd_witness)

    o = common(sub.add_parser("oracle-indices", help="partial indices from Toeplitz sections"))
    o.add_argument("--input", required=True)
    o.add_argument("--sections", type=int, default=None)
    o.set_defaults(run=cmd_oracle)

    r = sub.add_parser("regularize", help="make det nonvanishing on the circle")
    r.add_argument("--input", required=True)
    r.add_argument("--eps", type=float, default=1e-2)
    r.add_argument("--out", dest="out_doc", default=None, help="series document of the result")
    r.add_argument("--report", dest="out", default=None, help="write the JSON result here")
    r.set_defaults(run=cmd_regularize)
    return p


def _exit_code(exc):
    if isinstance(exc, (errors.NearSingular, errors.Inconclusive, errors.SpectrumViolation,
                        errors.SingularSample)):
        return EXIT_SINGULAR
    if isinstance(exc, (errors.DocumentError, errors.DimensionMismatch, OSError, ValueError,
                        errors.NotUnitary, errors.NotOnSphere)):
        return EXIT_INPUT
    return EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        paths, params, outputs, text = args.run(args)
    except (errors.TorusFactError, OSError, ValueError) as exc:
        code = _exit_code(exc)
        _emit_error(type(exc).__name__, str(exc), code)
        return code
    elapsed = time.perf_counter() - start
    report = {"operation": args.command, "inputs_sha256": _digest(paths) if paths else None,
              "parameters": params, "outputs": outputs}
    print(f"{args.command}: ok ({elapsed:.2f} s)")
    for line in text:
        print("  " + line)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
