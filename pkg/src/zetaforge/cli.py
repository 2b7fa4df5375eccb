"""Command-line interface: every pipeline as a subcommand with JSON or CSV output.

Exit codes: 0 success, 1 computation error (JSON error object on stdout),
2 argument error (usage on stderr).
"""

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from . import complexes, detreg, divisor, geodesics, gzeta, specfun, theta, torus
from .errors import ZetaforgeError

PRESETS = {
    "naturals": lambda: divisor.naturals(),
    "naturals-squared": lambda: divisor.naturals(2.0),
    "dual-P": divisor.make_dualP,
}


# -- output helpers -----------------------------------------------------------

def _plain(x):
    """Convert results to JSON-ready values; floats keep their shortest round-trip form."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, type(None), str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return {"re": _num(z.real), "im": _num(z.imag)}
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _num(float(x))
    if hasattr(x, "to_json"):
        return _plain(x.to_json())
    return str(x)


def _num(v):
    return v if math.isfinite(v) else str(v)


def _dumps(obj):
    return json.dumps(_plain(obj), sort_keys=True)


def _to_csv(rows):
    buf = io.StringIO()
    cols = list(rows[0].keys())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([repr(float(r[c])) if isinstance(r[c], (float, np.floating)) else r[c] for c in cols])
    return buf.getvalue()


def _threads(args):
    if args.threads:
        return args.threads
    env = os.environ.get("ZETAFORGE_THREADS")
    return int(env) if env else (os.cpu_count() or 1)


def _pmap(args, fn, items):
    """Ordered parallel map, so output order never depends on scheduling."""
    items = list(items)
    n = _threads(args)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _parse_list(text, conv=float):
    return [conv(x) for x in text.split(",") if x.strip()]


def _parse_grid(text):
    """'a:b:step' (inclusive) or a comma list."""
    if ":" in text:
        a, b, h = (float(x) for x in text.split(":"))
        n = int(round((b - a) / h))
        return [a + k * h for k in range(n + 1)]
    return _parse_list(text)


def _load_divisor(args):
    if args.preset:
        return PRESETS[args.preset]()
    if not args.divisor:
        raise argparse.ArgumentTypeError("one of --divisor or --preset is required")
    return divisor.load_divisor(args.divisor)


def _result(value, err, method, **extra):
    out = {"value": value, "abs_error_estimate": err, "method": method}
    out.update(extra)
    return out


# -- subcommands ----------------------------------------------------------------

def cmd_detreg(args):
    d = _load_divisor(args)
    v = detreg.det_reg(d)
    return _result(v, 1e-12 * abs(v), "zeta regularization (Hurwitz continuation)")


def cmd_charfn(args):
    d = _load_divisor(args)
    v = detreg.char_fn(d, args.lam)
    return _result(v, 1e-12 * abs(v), "det(D + lambda) via binomial Hurwitz expansion")


def cmd_fredholm(args):
    d = _load_divisor(args)
    lhs, rhs, diff = detreg.fredholm_vs_raySinger(d)
    return _result(lhs, diff, "Fredholm product vs regularized quotient", regularized_quotient=rhs)


def _spectrum(args):
    return geodesics.load_spectrum(args.spectrum)


def cmd_selberg(args):
    spec = _spectrum(args)
    s = complex(*args.s)
    prod = gzeta.log_selberg_Z(spec, s)
    cls = gzeta.log_selberg_Z(spec, s, form="class_sum")
    return _result(cmath.exp(prod), abs(cmath.exp(prod) - cmath.exp(cls)),
                   "Euler double product; error from the class-sum form", log_value=prod)


def cmd_ruelle(args):
    spec = _spectrum(args)
    R, diff = gzeta.ruelle_R(spec, complex(*args.s))
    return _result(R, diff, "Euler product; error from Z(s)/Z(s+1)")


def cmd_fuchsian_lengths(args):
    with open(args.gens) as fh:
        G = geodesics.FuchsianGroup.from_json(json.load(fh))
    if args.mode == "schottky":
        spec = geodesics.schottky_lengths(G, args.lmax)
    else:
        spec = geodesics.surface_group_lengths(G, args.lmax)
    if args.save:
        geodesics.save_spectrum(spec, args.save)
    return _result(spec.to_json(), 0.0, f"{args.mode} enumeration",
                   truncation={"L_max": args.lmax, "classes": len(spec.entries)})


def cmd_torus_torsion(args):
    spec = torus.TorusSpec(complex(*args.z), args.u, args.v)
    a = torus.log_hol_torsion(spec)
    b = math.log(torus.hol_torsion_closed(spec))
    return _result(math.exp(a), abs(math.exp(a) - math.exp(b)),
                   "Mellin-split zeta regularization; error from the theta closed form",
                   closed_form=math.exp(b))


def cmd_tower(args):
    spec = torus.TorusSpec(complex(*args.z))
    Ns = _parse_list(args.N, int)

    def one(N):
        return torus.tower_traces(spec, [N], args.t).scaled_traces[0]

    traces = _pmap(args, one, Ns)
    g = torus.gamma_trace(spec, args.t)
    return [{"N": N, "scaled_trace": tr, "gamma_trace": g, "diff": tr - g} for N, tr in zip(Ns, traces)]


def cmd_euler_char(args):
    b = _parse_list(args.betti, int)
    r, v = complexes.chi_gen(b)
    return _result({"chi": [complexes.chi_r(b, k) for k in range(len(b))], "r": r, "chi_gen": v},
                   0.0, "exact integer arithmetic")


def cmd_torsion(args):
    with open(args.complex) as fh:
        C = complexes.GradedComplex.from_json(json.load(fh))
    spec, kernels = complexes.laplacian_spectra(C)
    if args.r == 1:
        v = complexes.tau1(spec)
    else:
        v = complexes.tau_r(spec, args.r)
    return _result(v, 1e-10 * abs(v), f"tau_{args.r} from Laplacian spectra", betti=kernels)


def cmd_em(args):
    res = gzeta.em_constant(args.m)
    parts = [f"{p}^{e}" for p, e in res.prime_exponents.items()] + [f"exp({res.exp_argument})"]
    return _result(res.value, 1e-15 * abs(res.value), "exact rational pipeline",
                   exact=" * ".join(parts), prime_exponents=res.prime_exponents,
                   exp_argument=res.exp_argument)


def cmd_factor_infinity(args):
    rep = gzeta.factor_infinity_check(_parse_grid(args.grid))
    return _result(rep["ratio"], rep["spread"], "Gamma-trace Mellin regularization vs exp(s^2) det(P+s)",
                   rows=rep["rows"], calibration=rep["calibration"])


def _poly(args):
    return specfun.PolyQ([Fraction(x) for x in args.poly.split(",")], args.parity)


def _kernel(args):
    return tuple(Fraction(x) for x in args.kernel) if args.kernel else None


def cmd_theta_dual(args):
    Q = _poly(args)
    kern = _kernel(args)
    taus = _parse_grid(args.tau_grid)
    vals = _pmap(args, lambda t: theta.theta_dual(Q, t, kern), taus)
    return [{"tau": t, "re": v.real, "im": v.imag} for t, v in zip(taus, vals)]


def cmd_theta_poles(args):
    Q = _poly(args)
    fits = theta.theta_dual_poles(Q, tuple(args.region), _kernel(args))
    rep = theta.pole_report(fits, math.pi, Q.degree + 1, tuple(args.region))
    return _result([{"center": f.center, "order": f.order, "coefficients": f.coefficients, "residual": f.residual}
                    for f in fits], max((f.residual for f in fits), default=0.0),
                   "grid search, FFT refinement and Laurent fit", claim_report=rep)


def cmd_contour_theta(args):
    a = _parse_list(args.a)
    v = theta.contour_theta(a, args.tau)
    direct = math.fsum(math.exp(-args.tau * x) for x in a)
    return _result(v, abs(v - direct), "rectangle contour quadrature; error from the direct sum")


def cmd_identities(args):
    from . import identities
    rows = identities.run_all()
    failed = [r for r in rows if not r["ok"]]
    return _result(len(failed) == 0, 0.0, "invariant suite", checks=rows, failed=len(failed))


def _add_common_divisor(p):
    p.add_argument("--divisor", help="divisor JSON file")
    p.add_argument("--preset", choices=sorted(PRESETS))


def _add_global(p, default):
    p.add_argument("--csv", action="store_true", default=default or False,
                   help="CSV output for row-valued commands")
    p.add_argument("--out", default=default, help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=default,
                   help="worker threads (default ZETAFORGE_THREADS or CPU count)")
    p.add_argument("--manifest-out", default=default, help="write a run manifest")
    p.add_argument("--replay", default=default, help="re-run the command stored in a manifest")


def build_parser():
    ap = argparse.ArgumentParser(prog="zetaforge", description=__doc__.splitlines()[0])
    _add_global(ap, None)
    # the same options after the subcommand; SUPPRESS keeps earlier values
    common = argparse.ArgumentParser(add_help=False)
    _add_global(common, argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command")
    sub_add = sub.add_parser
    sub.add_parser = lambda name, **kw: sub_add(name, parents=[common], **kw)

    p = sub.add_parser("detreg")
    _add_common_divisor(p)
    p.set_defaults(func=cmd_detreg)
    p = sub.add_parser("charfn")
    _add_common_divisor(p)
    p.add_argument("--lam", type=float, required=True)
    p.set_defaults(func=cmd_charfn)
    p = sub.add_parser("fredholm")
    _add_common_divisor(p)
    p.set_defaults(func=cmd_fredholm)
    for name, fn in (("selberg", cmd_selberg), ("ruelle", cmd_ruelle)):
        p = sub.add_parser(name)
        p.add_argument("--spectrum", required=True)
        p.add_argument("--s", type=float, nargs=2, metavar=("RE", "IM"), required=True)
        p.set_defaults(func=fn)
    p = sub.add_parser("fuchsian-lengths")
    p.add_argument("--gens", required=True)
    p.add_argument("--lmax", type=float, required=True)
    p.add_argument("--mode", choices=["schottky", "surface"], default="schottky")
    p.add_argument("--save", help="also write the spectrum JSON here")
    p.set_defaults(func=cmd_fuchsian_lengths)
    p = sub.add_parser("torus-torsion")
    p.add_argument("--z", type=float, nargs=2, metavar=("RE", "IM"), required=True)
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--v", type=float, default=0.0)
    p.set_defaults(func=cmd_torus_torsion)
    p = sub.add_parser("tower")
    p.add_argument("--z", type=float, nargs=2, metavar=("RE", "IM"), required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N", default="1,2,4,8")
    p.set_defaults(func=cmd_tower)
    p = sub.add_parser("euler-char")
    p.add_argument("--betti", required=True, help="comma-separated Betti numbers")
    p.set_defaults(func=cmd_euler_char)
    p = sub.add_parser("torsion")
    p.add_argument("--complex", required=True, help="JSON list of differential matrices")
    p.add_argument("--r", type=int, default=1)
    p.set_defaults(func=cmd_torsion)
    p = sub.add_parser("em")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_em)
    p = sub.add_parser("factor-infinity")
    p.add_argument("--grid", default="1:3:0.5")
    p.set_defaults(func=cmd_factor_infinity)
    for name, fn in (("theta-dual", cmd_theta_dual), ("theta-poles", cmd_theta_poles)):
        p = sub.add_parser(name)
        p.add_argument("--poly", required=True, help="comma-separated rational coefficients, ascending")
        p.add_argument("--parity", choices=["odd", "even", "none"], default="odd")
        p.add_argument("--kernel", nargs=2, metavar=("B", "D"), help="kernel sum_n exp(-tau (B + D n))")
        if name == "theta-dual":
            p.add_argument("--tau-grid", required=True)
        else:
            p.add_argument("--region", type=float, nargs=4, default=[-1, 1, -7, 7],
                           metavar=("RE0", "RE1", "IM0", "IM1"))
        p.set_defaults(func=fn)
    p = sub.add_parser("contour-theta")
    p.add_argument("--a", required=True, help="comma-separated nonnegative spectrum")
    p.add_argument("--tau", type=float, required=True)
    p.set_defaults(func=cmd_contour_theta)
    p = sub.add_parser("identities")
    p.set_defaults(func=cmd_identities)
    return ap


def _render(args, result):
    if isinstance(result, list):
        return _to_csv(result) if args.csv else _dumps({"rows": result}) + "\n"
    return _dumps(result) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.replay:
        try:
            with open(args.replay) as fh:
                manifest = json.load(fh)
            argv = manifest["parameters"]["argv"]
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            ap.error(f"cannot replay manifest: {exc}")
        args = ap.parse_args(argv)
    if not args.command:
        ap.print_usage(sys.stderr)
        return 2
    try:
        result = args.func(args)
    except argparse.ArgumentTypeError as exc:
        ap.error(str(exc))
    except OSError as exc:
        ap.error(str(exc))
    except ZetaforgeError as exc:
        sys.stdout.write(_dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
        return 1
    text = _render(args, result)
    _emit(args, text)
    if args.manifest_out:
        clean = [a for a in argv if a not in ("--manifest-out", args.manifest_out)]
        trunc = result.get("truncation", {}) if isinstance(result, dict) else {}
        manifest = {"command": args.command, "parameters": {"argv": clean},
                    "tool_version": __version__, "truncation_metadata": trunc,
                    "outputs": [args.out] if args.out else []}
        with open(args.manifest_out, "w") as fh:
            fh.write(_dumps(manifest) + "\n")
    if args.command == "identities" and not result["value"]:
        return 1
    return 0
