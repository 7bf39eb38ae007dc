"""``tropos`` command-line front end.

Exit codes: 0 success, 1 failed self-test, 2 bad input or precondition,
3 numerical resolution failure, 64 unknown subcommand.  Every output starts
with a provenance header (tool version, parameters, input digests) and no
timestamp, so reruns are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from tropos import __version__
from tropos.errors import PreconditionError, ResolutionError

SUBCOMMANDS = ("newton", "jensen", "apseq", "lift", "jessen", "weil", "witt", "pwa")
EX_USAGE = 64


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _range(text: str) -> tuple:
    lo, _, hi = text.partition(":")
    if not hi:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return lo, hi


def _float_range(text: str) -> tuple:
    lo, hi = _range(text)
    return float(lo), float(hi)


def _int_range(text: str) -> tuple:
    lo, hi = _range(text)
    return int(lo), int(hi)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


class Output:
    """Collects one result and writes it with a provenance header."""

    def __init__(self, args, inputs: dict):
        self.args = args
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "selftest")}
        self.meta = {
            "tool": "tropos",
            "version": __version__,
            "command": args.command,
            "params": json.loads(json.dumps(params, default=str)),
            "inputs": {str(k): _sha256(v) for k, v in sorted(inputs.items())},
        }

    def _sink(self, text: str):
        if self.args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            Path(self.args.out).write_text(text)

    def json(self, payload: dict):
        body = {"meta": self.meta, **payload}
        self._sink(json.dumps(body, indent=1, default=_jsonable) + "\n")

    def table(self, header: list, rows):
        if self.args.format == "json":
            self.json({"columns": header, "rows": [list(r) for r in rows]})
            return
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.meta, sort_keys=True, default=str) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self._sink(buf.getvalue())


# ---------------------------------------------------------------- subcommands


def cmd_newton(args):
    from tropos.newton import ValuedSeries, root_valuations, tropicalize_na
    from tropos.pwa import laplacian

    if args.input:
        s = ValuedSeries.from_json(json.loads(Path(args.input).read_text()))
        inputs = {"in": args.input}
    elif args.poly:
        s = ValuedSeries.from_polynomial([Fraction(c) for c in args.poly.split(",")], args.p)
        inputs = {}
    else:
        raise PreconditionError("give --in spec.json or --poly c0,c1,...")
    f = tropicalize_na(s)
    payload = {"pwa": f.to_json(), "divisor": laplacian(f).to_json()}
    if s.is_polynomial:
        payload["root_valuations"] = root_valuations(s).to_json()
    Output(args, inputs).json(payload)


def _load_roots(path):
    data = json.loads(Path(path).read_text())
    roots = data["roots"] if isinstance(data, dict) else data
    out = []
    for r in roots:
        out.append(complex(r[0], r[1]) if isinstance(r, (list, tuple)) else complex(r))
    return out


def cmd_jensen(args):
    from tropos.jensen import AnnulusFunction, tropical_profile
    from tropos.pwa import laplacian

    if args.xmin >= args.xmax:
        raise PreconditionError("need --xmin < --xmax")
    roots = _load_roots(args.roots)
    f = AnnulusFunction.from_roots(roots)
    prof = tropical_profile(f, np.linspace(args.xmin, args.xmax, args.n_grid), n_nodes=args.n_nodes)
    div = laplacian(prof)
    Output(args, {"roots": args.roots}).json({
        "pwa": prof.to_json(),
        "divisor": div.to_json(),
        "expected": sorted(-math.log(abs(z)) for z in roots if z != 0 and args.xmin < -math.log(abs(z)) < args.xmax),
    })


def cmd_apseq(args):
    from tropos.apseq import APSequence, u_numerators

    lo, hi = args.range
    if lo > hi:
        raise PreconditionError("empty range")
    seq = APSequence.from_chain(args.chain) if args.chain else APSequence(args.p)
    ks = np.arange(lo, hi + 1)
    num, den = u_numerators(seq, ks)
    rows = []
    for k, n in zip(ks.tolist(), num.tolist()):
        fr = Fraction(int(n), int(den))
        rows.append((k, fr.numerator, fr.denominator))
    Output(args, {}).table(["k", "numerator", "denominator"], rows)


def _parse_psi(text: str):
    name, _, spec = text.partition("=")
    kind, _, body = spec.partition(":")
    if name != "psi" or kind != "poly" or not body:
        raise PreconditionError(f"--pair expects psi=poly:c0,c1,..., got {text!r}")
    coeffs = [float(c) for c in body.split(",")]
    return np.polynomial.Polynomial(coeffs), coeffs


def cmd_lift(args):
    from tropos.lift import build_lift, closed_form_pairing, fig4_divisor, pair_with_test, strip_count

    if args.density != "fig4":
        raise PreconditionError(f"unknown density preset {args.density!r} (available: fig4)")
    d = fig4_divisor()
    L = build_lift(d, args.K)
    out = Output(args, {})
    if args.pair:
        psi, coeffs = _parse_psi(args.pair)
        T = args.T or args.K
        payload = {
            "psi_coefficients": coeffs,
            "T": T,
            "pairing": pair_with_test(L, psi, T),
            "closed_form": closed_form_pairing(d, psi),
        }
        if args.strip:
            lo, hi = args.strip
            payload["strip"] = [lo, hi]
            payload["strip_count"] = strip_count(L, lo, hi, T)
            payload["cdf_difference"] = float(d.plus.normalize_mass().cdf(hi) - d.plus.normalize_mass().cdf(lo))
        out.json(payload)
        return
    rows = []
    for k, a, b in zip(L.heights.tolist(), L.plus.tolist(), L.minus.tolist()):
        rows.append((k, 1, repr(a)))
        rows.append((k, -1, repr(b)))
    out.table(["k", "sign", "position"], rows)


def cmd_jessen(args):
    from tropos.jessen import ExponentialSum, zero_density_check

    f = ExponentialSum.parse(args.sum)
    s1, s2 = args.strip
    rep = zero_density_check(f, s1, s2, T=args.T, seed=args.seed)
    rep["sum"] = {"frequencies": list(f.frequencies), "coefficients": list(f.coefficients)}
    Output(args, {}).json(rep)


def _parse_test_function(text: str):
    from tropos.weil import gaussian_log_bump, log_bump

    kind, _, body = text.partition(":")
    vals = [float(v) for v in body.split(",") if v]
    if kind == "bump" and len(vals) == 2:
        return log_bump(*vals)
    if kind == "gauss" and len(vals) == 2:
        a, b = vals
        return gaussian_log_bump(math.sqrt(a * b), math.log(b / a) / 8, (a, b))
    if kind == "gauss" and len(vals) == 4:
        c, w, a, b = vals
        return gaussian_log_bump(c, w, (a, b))
    raise PreconditionError(f"--f expects bump:a,b | gauss:a,b | gauss:center,width,a,b, got {text!r}")


def cmd_weil(args):
    from tropos import weil as W

    if args.check == "omega":
        Output(args, {}).json({"omega_at_one": W.omega_at_one(), "summands": list(W.omega_terms())})
        return
    if not args.f:
        raise PreconditionError(f"--check {args.check} needs --f")
    f = _parse_test_function(args.f)
    if args.check == "explicit":
        path = W.find_zero_table(args.zeros)
        Z = W.load_zeros(path)
        if args.n_zeros:
            Z = Z.head(args.n_zeros)
        rep = W.explicit_formula_check(f, Z, threads=args.threads)
        Output(args, {"zeros": path}).json(rep)
    else:  # quadratic, on the projection to int f d*u = int f du = 0
        a, b = f.support
        m = math.sqrt(a * b)
        g = W.project_admissible(f, W.log_bump(a, m), W.log_bump(m, b))
        Output(args, {}).json({
            "s_ff": W.quadratic_form(g, g),
            "moments": list(W.moments(g)),
            "s_ff_unprojected": W.quadratic_form(f, f),
            "moments_unprojected": list(W.moments(f)),
        })


def _mu(text: str) -> Fraction:
    return Fraction(text)


def cmd_witt(args):
    from tropos.witt import frobenius_lift, holomorphy_residual, q_grid

    nx, _, ny = args.grid.partition("x")
    nx, ny = int(nx), int(ny or nx)
    lams = [Fraction(x) for x in args.lambdas.split(",")]
    rows = []
    if args.check == "frobenius":
        for r in (Fraction(1), Fraction(1, 2), Fraction(1, 3)):
            F = q_grid(nx, ny, r)
            G = frobenius_lift(args.mu, F)
            target = q_grid(nx, ny, r, y_range=(args.mu * F.ys[0], args.mu * F.ys[-1]))
            fixed = G.same_keys(target)
            gap = G.max_coefficient_gap(target)
            for lam in lams:
                rows.append((str(r), str(lam), repr(holomorphy_residual(F, lam)),
                             repr(holomorphy_residual(G, lam)), int(fixed), repr(gap)))
        Output(args, {}).table(["r", "lambda", "residual_before", "residual_after", "keys_fixed", "coef_gap"], rows)
    else:  # refinement
        for lam in lams:
            prev = None
            for n in (nx // 4, nx // 2, nx):
                res = holomorphy_residual(q_grid(n, n), lam)
                rows.append((str(lam), n, repr(res), repr(prev / res) if prev else ""))
                prev = res
        Output(args, {}).table(["lambda", "n", "residual", "ratio"], rows)


def _parse_divisor(text: str):
    from tropos.pwa import Divisor

    atoms = []
    for item in text.split(","):
        if item.strip():
            m, _, x = item.partition("@")
            atoms.append((Fraction(x), Fraction(m)))
    return Divisor(tuple(atoms))


def cmd_pwa(args):
    from tropos.pwa import PiecewiseAffine, as_number, laplacian, rr_solve

    out = Output(args, {"in": args.input} if args.input else {})
    if args.op == "rr":
        if not args.divisor:
            raise PreconditionError("--op rr needs --divisor m@x,...")
        D = _parse_divisor(args.divisor)
        dom = tuple(as_number(v) for v in args.domain) if args.domain else (-math.inf, math.inf)
        f = rr_solve(D, dom)
        out.json({"pwa": f.to_json(), "divisor": D.to_json(), "sum": (D + laplacian(f)).to_json()})
        return
    if not args.input:
        raise PreconditionError(f"--op {args.op} needs --in pwa.json")
    data = json.loads(Path(args.input).read_text())
    f = PiecewiseAffine.from_json(data.get("pwa", data))
    if args.op == "laplacian":
        out.json({"divisor": laplacian(f).to_json(), "convex": f.is_convex(), "integral": f.has_integral_slopes()})
    else:
        if args.x is None:
            raise PreconditionError("--op eval needs --x")
        out.json({"x": args.x, "value": str(f(as_number(args.x)))})


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0, help="seed for jitter policies")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--selftest", action="store_true", help="run quick built-in checks and exit")

    parser = argparse.ArgumentParser(prog="tropos", description="Tropical descent toolkit.")
    parser.add_argument("--version", action="version", version=f"tropos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("newton", parents=[common], help="Newton-polygon tropicalization")
    p.add_argument("--in", dest="input", help="ValuedSeries JSON")
    p.add_argument("--poly", help="rational coefficients c0,c1,... (alternative to --in)")
    p.add_argument("--p", type=int, default=2)
    p.set_defaults(func=cmd_newton)

    p = sub.add_parser("jensen", parents=[common], help="circle-mean tropicalization of a polynomial")
    p.add_argument("--roots", required=True, help="JSON list of roots, complex as [re, im]")
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--n-grid", type=int, default=65)
    p.add_argument("--n-nodes", type=int, default=256)
    p.set_defaults(func=cmd_jensen)

    p = sub.add_parser("apseq", parents=[common], help="digit-reversal sequence values")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--chain", type=lambda s: [int(v) for v in s.split(",")], help="divisibility chain n1,n2,...")
    p.add_argument("--range", type=_int_range, default=(-16, 16))
    p.set_defaults(func=cmd_apseq)

    p = sub.add_parser("lift", parents=[common], help="discrete lift of a signed density")
    p.add_argument("--density", default="fig4")
    p.add_argument("--K", type=int, default=1000)
    p.add_argument("--T", type=int)
    p.add_argument("--pair", help="psi=poly:c0,c1,...")
    p.add_argument("--strip", type=_float_range, help="lo:hi strip for the count check")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("jessen", parents=[common], help="zero density of an exponential sum")
    p.add_argument("--sum", required=True, help='terms "c@freq,..." (freq may be logN)')
    p.add_argument("--strip", type=_float_range, required=True)
    p.add_argument("--T", type=float, default=1000.0)
    p.set_defaults(func=cmd_jessen)

    p = sub.add_parser("weil", parents=[common], help="explicit formula and quadratic form")
    p.add_argument("--check", choices=("explicit", "quadratic", "omega"), default="explicit")
    p.add_argument("--zeros", default="zeros_1000.txt", help="zero file (searched in TROPOS_DATA_DIR, then bundled data)")
    p.add_argument("--n-zeros", type=int)
    p.add_argument("--f", help="bump:a,b | gauss:a,b | gauss:center,width,a,b")
    p.set_defaults(func=cmd_weil)

    p = sub.add_parser("witt", parents=[common], help="Frobenius lift and holomorphy residuals")
    p.add_argument("--check", choices=("frobenius", "refinement"), default="frobenius")
    p.add_argument("--mu", type=_mu, default=Fraction(2))
    p.add_argument("--grid", default="64x64")
    p.add_argument("--lambdas", default="1/2,1,2")
    p.set_defaults(func=cmd_witt)

    p = sub.add_parser("pwa", parents=[common], help="piecewise-affine utilities")
    p.add_argument("--op", choices=("laplacian", "eval", "rr"), default="laplacian")
    p.add_argument("--in", dest="input", help="PiecewiseAffine JSON (or a file with a 'pwa' key)")
    p.add_argument("--x")
    p.add_argument("--divisor", help="atoms m@x,... for --op rr")
    p.add_argument("--domain", type=_range)
    p.set_defaults(func=cmd_pwa)
    return parser


NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def _glue_ranges(argv: list) -> list:
    # "--strip -1:1" would read "-1:1" as an option; rewrite to "--strip=-1:1"
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) and NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_ranges(list(sys.argv[1:] if argv is None else argv))
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is not None and first not in SUBCOMMANDS:
        sys.stderr.write(f"tropos: unknown subcommand {first!r}; choose from {', '.join(SUBCOMMANDS)}\n")
        return EX_USAGE
    if first is not None and "--selftest" in argv:
        from tropos.selftest import run_checks

        return 0 if run_checks(first) else 1
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        sys.stderr.write("tropos: --threads must be >= 1\n")
        return 2
    try:
        args.func(args)
    except ResolutionError as exc:
        sys.stderr.write(f"tropos: resolution error: {exc}\n")
        return 3
    except (PreconditionError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"tropos: {type(exc).__name__}: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
