"""Command line entry point; every command prints a JSON document."""

import argparse
import csv
import json
import math
import sys

from . import calculus as ca
from . import clifford as cl
from . import harness as hs
from . import hinfty as hi
from . import linalg as la
from .errors import SpectralError
from .functions import parse_function_id


def _load_operator(path):
    with open(path) as fh:
        return la.RightLinearOperator.from_dict(json.load(fh))


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _unit(text, n):
    if text is None:
        return ca.default_units(n)[0]
    return cl.ImaginaryUnit.normalized(cl.parse_clifford(text, n).coeffs[1:n + 1])


def _contour(args, T, f):
    J = _unit(args.J, T.n)
    kw = {"tol": args.tol} if args.tol is not None else {}
    return ca.ContourSpec.for_operator(T, f, phi=args.phi, J=J, **kw)


def _write_profile(path, rows, header):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_spectrum(args):
    T = _load_operator(args.operator)
    spheres = ca.s_spectrum(T)
    return {"spheres": [s.to_dict() for s in spheres],
            "spectral_angle": ca.spectral_angle(T)}


def cmd_resolvent(args):
    T = _load_operator(args.operator)
    s = cl.as_paravector(cl.parse_clifford(args.s, T.n))
    out = {"s": str(s.element), "qs_inverse": ca.qs_inverse(T, s).to_dict(),
           "left": ca.s_resolvent_left(T, s).to_dict(),
           "right": ca.s_resolvent_right(T, s).to_dict()}
    out["identities"] = ca.resolvent_identities_check(T, s)
    return out


def cmd_certify(args):
    T = _load_operator(args.operator)
    cert = ca.certify_bisectorial(T, args.phi, require_injective=args.require_injective)
    if args.profile:
        _write_profile(args.profile, cert.profile_rows(), ["abs_s", "angle", "scaled_norm"])
    out = cert.to_dict()
    if cert.passed:
        out["estimates"] = ca.lemma_estimates(T, cert).to_dict()
    return out


def cmd_calc(args):
    T = _load_operator(args.operator)
    f = parse_function_id(args.f, T.n)
    cfg = _contour(args, T, f)
    info = {}
    F = ca.omega_calc(f, T, cfg, side=args.side, info=info)
    return {"function": f.describe(), "contour": cfg.to_dict(), "quadrature": info,
            "result": F.to_dict()}


def cmd_hinf(args):
    T = _load_operator(args.operator)
    f = parse_function_id(args.f, T.n)
    cfg = _contour(args, T, f)
    m = None if args.m == "auto" else int(args.m)
    if args.side == "left":
        info = {}
        F = hi.hinf_left(f, T, cfg, m=m, check_e=True, info=info)
        return {"function": f.describe(), "provenance": info["provenance"],
                "discrepancy": {"e_quadrature": info["e_quadrature"]}, "operator": F.to_dict()}
    res = hi.hinf_right(f, T, cfg, m=m, check_e=True)
    return {"function": f.describe(), **res.to_dict()}


def cmd_verify(args):
    cfg = hs.ScenarioConfig.from_json(args.config)
    items = hs.generate_operators(cfg)
    report = hs.run_suite(cfg, items)
    if args.csv:
        _write_profile(args.csv, hs.certification_profiles(cfg, items),
                       ["operator", "abs_s", "angle", "scaled_norm"])
    doc = report.to_dict()
    _emit(doc, args.out)
    if args.out:
        print(json.dumps(report.summary))
    return 0 if report.ok else 1


def cmd_demo(args):
    T = hs.dirac_operator(args.points, args.amplitude)
    spheres = ca.s_spectrum(T)
    dec = ca.decomposition_check(T)
    out = {"points": args.points, "amplitude": args.amplitude, "dim": T.dim,
           "spectral_radius": max((abs(s.center) + s.radius for s in spheres), default=0.0),
           "spectral_angle": ca.spectral_angle(T), "decomposition": dec}
    try:
        cert = ca.certify_bisectorial(T, args.phi)
        out["certificate"] = cert.to_dict()
    except SpectralError as exc:
        out["certificate"] = {"passed": False, "reason": f"{type(exc).__name__}: {exc}"}
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="sspectral", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="S-spectrum spheres of an operator")
    s.add_argument("operator")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("resolvent", help="Q_s inverse and both S-resolvents at s")
    s.add_argument("operator")
    s.add_argument("--s", required=True, help="paravector literal, e.g. '1+2*e1'")
    s.set_defaults(func=cmd_resolvent)

    s = sub.add_parser("certify", help="sample the resolvent bound outside a double sector")
    s.add_argument("operator")
    s.add_argument("--phi", type=float, required=True)
    s.add_argument("--profile", help="CSV file for the sampled values")
    s.add_argument("--require-injective", action="store_true")
    s.set_defaults(func=cmd_certify)

    for name, func, helptext in (("calc", cmd_calc, "contour calculus of a decaying function"),
                                 ("hinf", cmd_hinf, "regularized calculus of a polynomially bounded function")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("operator")
        s.add_argument("--f", required=True, help="function id: reg:m, poly:[...]:side, rat:[...]/[...]")
        s.add_argument("--side", choices=("left", "right"), default="left")
        s.add_argument("--phi", type=float)
        s.add_argument("--J", help="imaginary unit literal, e.g. 'e1' or 'e1+e2'")
        s.add_argument("--tol", type=float)
        if name == "hinf":
            s.add_argument("--m", default="auto")
        s.set_defaults(func=func)

    s = sub.add_parser("verify", help="run a scenario configuration")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("demo", help="exploratory models")
    demo = s.add_subparsers(dest="model", required=True)
    d = demo.add_parser("dirac", help="periodic central-difference Dirac operator")
    d.add_argument("--points", type=int, default=8)
    d.add_argument("--amplitude", type=float, default=0.0)
    d.add_argument("--phi", type=float, default=0.3)
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (SpectralError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    if isinstance(result, int):
        return result
    _emit(_clean(result))
    return 0


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


if __name__ == "__main__":
    sys.exit(main())
