"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 not certified by the method,
3 dominance refuted, 4 a selfcheck criterion failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import freqbound, midcore, pendulum, roots, simulate, specfun
from .errors import MidspecError
from .quasipoly import Quasipolynomial, RealPolynomial, SearchBox, normalize

EXIT_OK, EXIT_INPUT, EXIT_NOT_CERTIFIED, EXIT_REFUTED, EXIT_SELFCHECK = 0, 1, 2, 3, 4


class InputProblem(Exception):
    """Malformed input; the message carries a line or field diagnostic."""


# -- deterministic JSON ----------------------------------------------------

def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float written to 17 significant digits, keys in insertion order."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (_num(float(v)) if not isinstance(v, (int, np.integer)) or isinstance(v, bool) else str(int(v))) for v in row])
    return buf.getvalue()


# -- input -----------------------------------------------------------------

def _read_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InputProblem(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputProblem(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputProblem(f"{path}: top-level value must be an object")
    return data


def _field(d: dict, key: str, kind=float):
    if key not in d:
        raise InputProblem(f"field {key!r}: missing")
    v = d[key]
    if kind is int:
        if not isinstance(v, int) or isinstance(v, bool):
            raise InputProblem(f"field {key!r}: expected an integer")
        return v
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise InputProblem(f"field {key!r}: expected a number")
    return float(v)


def _quasi(d: dict) -> Quasipolynomial:
    try:
        return Quasipolynomial.from_dict(d)
    except MidspecError as exc:
        raise InputProblem(str(exc)) from None


def _design(d: dict) -> midcore.MidDesign:
    n, m = _field(d, "n", int), _field(d, "m", int)
    tau, lam0, A = _field(d, "tau"), _field(d, "lambda0"), _field(d, "A")
    try:
        return midcore.force_multiplicity(n, m, tau, lam0, A)
    except (MidspecError, ValueError, ArithmeticError) as exc:
        raise InputProblem(str(exc)) from None


class _Out:
    def __init__(self, directory: str | None, quiet: bool):
        self.dir = directory
        self.quiet = quiet
        if directory:
            os.makedirs(directory, exist_ok=True)

    def write(self, name: str, text: str, show: bool = False):
        if self.dir:
            with open(os.path.join(self.dir, name), "w") as fh:
                fh.write(text)
        if show and not self.quiet:
            sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------

def cmd_design(args, out: _Out) -> int:
    data = _read_json(args.input)
    d = _design(data)
    report = {
        "input": data,
        "quasi": d.quasi.to_dict(),
        "combo": {"a": d.combo.a, "b": d.combo.b, "alpha": d.combo.alpha, "beta": d.combo.beta},
        "multiplicity": midcore.multiplicity_check(d.quasi, d.lambda0),
        "kernel_positive": midcore.kernel_positivity(d.n, d.m, d.a_param),
    }
    out.write("quasi.json", dumps(d.quasi.to_dict()) + "\n")
    out.write("design_report.json", dumps(report) + "\n", show=True)
    return EXIT_OK


def _certify_target(data: dict, lambda0: float | None) -> midcore.MidDesign:
    if "A" in data:
        return _design(data)
    if "quasi" in data:
        q = _quasi(data["quasi"])
        lam = _field(data, "lambda0") if lambda0 is None else lambda0
    else:
        q = _quasi(data)
        if lambda0 is None:
            raise InputProblem("field 'lambda0': missing (pass --lambda0 for a bare quasipolynomial)")
        lam = lambda0
    try:
        return midcore.design_from_quasi(q, lam)
    except (MidspecError, ValueError) as exc:
        raise InputProblem(str(exc)) from None


def cmd_certify(args, out: _Out) -> int:
    data = _read_json(args.input)
    d = _certify_target(data, args.lambda0)
    cert = midcore.certify_dominance(d, args.max_ord, numeric_check=not args.no_numeric)
    report = {
        "input": data,
        "config": {"max_ord": args.max_ord, "numeric_check": not args.no_numeric},
        "design": d.to_dict(),
        "certificate": cert.to_dict(),
    }
    out.write("certificate.json", dumps(report) + "\n", show=True)
    return {"certified": EXIT_OK, "not-certified-by-method": EXIT_NOT_CERTIFIED, "refuted": EXIT_REFUTED}[cert.verdict]


def cmd_spectrum(args, out: _Out) -> int:
    data = _read_json(args.input)
    q = _quasi(data)
    try:
        box = SearchBox(*args.box)
    except MidspecError as exc:
        raise InputProblem(str(exc)) from None
    rep = roots.find_roots(q, box, args.tol)
    report = {"input": data, "config": {"box": list(args.box), "tol": args.tol}, "spectrum": rep.to_dict()}
    rows = [(r.location.real, r.location.imag, r.multiplicity, r.residual) for r in rep.roots]
    out.write("roots.csv", _csv(["re", "im", "multiplicity", "residual"], rows))
    out.write("spectrum.json", dumps(report) + "\n", show=True)
    return EXIT_OK


def cmd_freq_bound(args, out: _Out) -> int:
    data = _read_json(args.input)
    q = _quasi(data)
    if args.lambda0 is not None:
        q = normalize(q, args.lambda0)
    elif q.tau != 1.0:
        raise InputProblem("field 'tau': a normalized quasipolynomial has delay 1 (or pass --lambda0)")
    rep = freqbound.frequency_bound(q, args.max_ord)
    report = {"input": data, "config": {"max_ord": args.max_ord, "lambda0": args.lambda0}, "report": rep.to_dict()}
    out.write("sup_curve.csv", _csv(["x", "omega_sq_max"], rep.sup_curve))
    out.write("freq_bound.json", dumps(report) + "\n", show=True)
    return EXIT_OK if rep.dominance_flag else EXIT_NOT_CERTIFIED


def cmd_pendulum(args, out: _Out) -> int:
    try:
        cfg = pendulum.PendulumConfig(args.g, args.L, args.variant, args.eps)
        if args.curves:
            ratios = [float(r) for r in args.ratios.split(",")]
            text = pendulum.triple_root_table(ratios, args.tau_grid)
            out.write("triple_root_curves.csv", text, show=True)
            return EXIT_OK
        if args.gmid:
            pd = pendulum.gmid_design(cfg)
        elif cfg.variant == "classical":
            if args.tau is None:
                raise InputProblem("--tau is required (or pass --gmid / --curves)")
            pd = pendulum.intermediate_design(cfg, args.tau)
        else:
            if args.tau is None:
                raise InputProblem("--tau is required for the inverted variant")
            pd = pendulum.inverted_design(cfg, args.tau)
    except MidspecError as exc:
        raise InputProblem(str(exc)) from None
    q = pd.quasi()
    report = {
        "input": {k: getattr(args, k) for k in ("variant", "g", "L", "eps", "tau", "gmid")},
        "design": pd.to_dict(),
        "quasi": q.to_dict(),
        "multiplicity": midcore.multiplicity_check(q, pd.lambda0),
    }
    out.write("pendulum.json", dumps(report) + "\n", show=True)
    return EXIT_OK


def _history(spec):
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return float(spec)
    if isinstance(spec, list) and spec and all(isinstance(v, (int, float)) for v in spec):
        return RealPolynomial(tuple(float(v) for v in spec))
    raise InputProblem("field 'history': expected a number or a list of polynomial coefficients")


def cmd_simulate(args, out: _Out) -> int:
    data = _read_json(args.input)
    if "quasi" not in data:
        raise InputProblem("field 'quasi': missing")
    q = _quasi(data["quasi"])
    hist = _history(data.get("history", 1.0))
    t_end = _field(data, "t_end")
    dt = _field(data, "dt") if "dt" in data else None
    try:
        prob = simulate.DdeProblem(q, hist, t_end, dt)
        traj = simulate.integrate(prob)
        window = data.get("window", [5 * q.tau, min(20 * q.tau, t_end)])
        rate = simulate.fit_decay_rate(traj, window)
    except MidspecError as exc:
        raise InputProblem(str(exc)) from None
    report = {"input": data, "dt": prob.dt, "window": list(window), "fitted_rate": rate}
    out.write("trajectory.csv", traj.to_csv())
    out.write("fit.json", dumps(report) + "\n", show=True)
    return EXIT_OK


def cmd_selfcheck(args, out: _Out) -> int:
    from .acceptance import run_all

    results = run_all()
    lines = [r.line() for r in results]
    if not out.quiet:
        print("\n".join(lines))
    out.write("selfcheck.txt", "\n".join(lines) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFCHECK


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_specfun(args, out: _Out) -> int:
    z = args.z
    try:
        if args.fn == "phi":
            val = specfun.kummer_phi((args.a, args.b), z)
        elif args.fn == "phi-integral":
            val = specfun.kummer_phi_integral((args.a, args.b), z)
        elif args.fn == "gamma":
            val = specfun.gamma(z)
        elif args.fn == "F":
            val = specfun.combo_F((args.a, args.b, args.alpha, args.beta), z)
        else:
            val = specfun.whittaker_W((args.a, args.b, args.alpha, args.beta), z)
    except (MidspecError, ValueError) as exc:
        raise InputProblem(str(exc)) from None
    report = {
        "input": {"fn": args.fn, "a": args.a, "b": args.b, "alpha": args.alpha, "beta": args.beta, "z": z},
        "value": complex(val),
    }
    out.write("specfun.json", dumps(report) + "\n", show=True)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="midspec", description="Multiplicity-induced dominance designs for single-delay systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="directory for report files")
        sp.add_argument("--quiet", action="store_true", help="do not echo the report to stdout")

    sp = sub.add_parser("design", help="synthesize a multiplicity-(n+m) quasipolynomial")
    sp.add_argument("input", help="JSON {n, m, tau, lambda0, A} ('-' for stdin)")
    common(sp)
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("certify", help="certify dominance of the multiple root")
    sp.add_argument("input", help="design JSON, {quasi, lambda0}, or a quasipolynomial with --lambda0")
    sp.add_argument("--lambda0", type=float, default=None)
    sp.add_argument("--max-ord", type=int, default=5)
    sp.add_argument("--no-numeric", action="store_true", help="skip the root-finder cross-check")
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("spectrum", help="roots inside a search box")
    sp.add_argument("input", help="quasipolynomial JSON")
    sp.add_argument("--box", type=float, nargs=4, default=[-5.0, 5.0, -20.0, 20.0], metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("freq-bound", help="frequency bound of a normalized quasipolynomial")
    sp.add_argument("input", help="quasipolynomial JSON with tau = 1 (or any tau with --lambda0)")
    sp.add_argument("--max-ord", type=int, default=5)
    sp.add_argument("--lambda0", type=float, default=None, help="normalize around this root first")
    common(sp)
    sp.set_defaults(func=cmd_freq_bound)

    sp = sub.add_parser("pendulum", help="pendulum PD designs and triple-root curves")
    sp.add_argument("--variant", choices=["classical", "inverted"], default="classical")
    sp.add_argument("--g", type=float, default=1.0)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=0.0, help="mass ratio for the inverted variant")
    sp.add_argument("--tau", type=float, default=None)
    sp.add_argument("--gmid", action="store_true", help="quadruple-root design")
    sp.add_argument("--figure2", "--curves", dest="curves", action="store_true", help="emit lambda0(tau) triple-root curves as CSV")
    sp.add_argument("--ratios", default="1,2,3,4,5,6,7")
    sp.add_argument("--tau-grid", type=int, default=200)
    common(sp)
    sp.set_defaults(func=cmd_pendulum)

    sp = sub.add_parser("simulate", help="integrate the DDE and fit the decay rate")
    sp.add_argument("input", help="JSON {quasi, history, t_end, dt?, window?}")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("selfcheck", help="run the acceptance suite")
    common(sp)
    sp.set_defaults(func=cmd_selfcheck)

    sp = sub.add_parser("specfun", help="evaluate a special function")
    sp.add_argument("action", choices=["eval"])
    sp.add_argument("fn", choices=["phi", "phi-integral", "gamma", "F", "W"])
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=2.0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--z", type=_complex, required=True)
    common(sp)
    sp.set_defaults(func=cmd_specfun)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(args.out, args.quiet)
    try:
        return args.func(args, out)
    except InputProblem as exc:
        print(f"midspec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
