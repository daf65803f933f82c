"""Command-line front end: ``lisdist <command> <action> [options]``.

Exit status is 0 on success, 2 on usage errors (bad flags or parameters
outside a function's domain) and 1 when a computation fails.  Settings can
come from a key=value file named by LIS_CONFIG; command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .errors import DomainError, LisdistError

# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Config:
    m: int = 80
    L: float = 14.0
    tw_npts: int = 240
    seed: int = 0
    out: str = "json"
    digits: int = 15
    threads: int = 0

    def validate(self) -> "Config":
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "out":
                if v not in ("csv", "json"):
                    raise DomainError(f"out must be csv or json, got {v!r}")
            elif f.name in ("seed", "threads"):
                if v < 0:
                    raise DomainError(f"{f.name} must be >= 0")
            elif not v > 0:
                raise DomainError(f"{f.name} must be positive")
        return self


def load_config(path: str | None) -> Config:
    cfg = Config()
    if not path:
        return cfg
    types = {f.name: f.type for f in fields(Config)}
    updates = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            if key not in types:
                raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
            conv = {"int": int, "float": float}.get(types[key], str)
            try:
                updates[key] = conv(value)
            except ValueError:
                raise DomainError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return replace(cfg, **updates).validate()


# --------------------------------------------------------------------------
# output


def _fmt(v, digits):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.{digits}g}")
    if hasattr(v, "item"):
        return _fmt(v.item(), digits)
    return v


def emit_table(header, rows, fmt: str, digits: int, stream=None):
    stream = stream or sys.stdout
    if fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v, digits) for v in r])
    else:
        json.dump([{h: _fmt(v, digits) for h, v in zip(header, r)} for r in rows], stream)
        stream.write("\n")


def emit_object(obj: dict, fmt: str, digits: int, stream=None):
    stream = stream or sys.stdout
    if fmt == "csv":
        emit_table(list(obj), [list(obj.values())], "csv", digits, stream)
    else:
        json.dump({k: _fmt(v, digits) for k, v in obj.items()}, stream)
        stream.write("\n")


# --------------------------------------------------------------------------
# commands


def _tw_model(cfg: Config):
    from .tracy_widom import build_tw_model, default_model
    if (cfg.m, cfg.L, cfg.tw_npts) == (80, 14.0, 240):
        return default_model()
    return build_tw_model(cfg.tw_npts, cfg.m, cfg.L)


def cmd_tw(args, cfg):
    import numpy as np
    model = _tw_model(cfg)
    if args.action == "eval":
        emit_object({"t": args.t, "k": args.k, "value": model(args.t, args.k)}, args.out or "json", cfg.digits)
    else:
        ts = np.linspace(args.a, args.b, args.n)
        emit_table(["t", f"F{args.k}"], [[t, model(t, args.k)] for t in ts], args.out or "csv", cfg.digits)


def cmd_lis(args, cfg):
    from .exact_lis import exact_dist, monte_carlo
    if args.action == "exact":
        d = exact_dist(args.n)
        ls = range(d.n + 1) if args.l is None else [args.l]
        rows = []
        for l in ls:
            c = d.cdf(l)
            rows.append([d.n, l, str(c.numerator), str(c.denominator)])
        emit_table(["n", "l", "numerator", "denominator"], rows, args.out or "csv", cfg.digits)
    else:
        seed = cfg.seed if args.seed is None else args.seed
        summary = monte_carlo(args.n, args.samples, seed)
        out = args.out or "json"
        if out == "json":
            json.dump(summary.to_dict(), sys.stdout)
            sys.stdout.write("\n")
        else:
            emit_table(["l", "count"], sorted(summary.histogram.items()), "csv", cfg.digits)


def cmd_poisson(args, cfg):
    from .exact_lis import poisson_gf
    from .expansions import e2_hard
    z = complex(args.z.replace(" ", ""))
    val = poisson_gf(args.l, z, args.K)
    obj = {"z": str(z), "l": args.l, "series_real": val.real, "series_imag": val.imag}
    if z.imag == 0 and z.real > 0:
        obj["e2_hard"] = e2_hard(4.0 * z.real, args.l, cfg.m, cfg.L)
    emit_object(obj, args.out or "json", cfg.digits)


def cmd_expansion(args, cfg):
    from .expansions import coeff, figure_data
    model = _tw_model(cfg)
    if args.action == "figure":
        params = {}
        if args.n is not None:
            params["n"] = args.n
        header, rows = figure_data(args.which, params, model)
        emit_table(header, rows, args.out or "csv", cfg.digits)
    else:
        emit_object({"family": args.family, "j": args.j, "t": args.t,
                     "value": coeff(args.family, args.j, args.t, model)}, args.out or "json", cfg.digits)


def cmd_stirling(args, cfg):
    from .stirling import stirling_eval
    emit_object(stirling_eval(args.n, args.l, args.simplified, args.with_tau), args.out or "json", cfg.digits)


def cmd_depoisson(args, cfg):
    from .depoisson import hayman_bound_check, jasz_eval, johansson_sandwich
    if args.action == "jasz":
        emit_object(jasz_eval(args.n, args.l, args.M), args.out or "json", cfg.digits)
    elif args.action == "sandwich":
        lo, hi, ex, ok = johansson_sandwich(args.n, args.s, args.l)
        emit_object({"lower": lo, "upper": hi, "exact": ex, "holds": ok}, args.out or "json", cfg.digits)
    else:
        rep = hayman_bound_check(args.l, args.r)
        rows = [[row.theta, row.abs_f, row.bound, row.practical_bound, row.ok] for row in rep.rows]
        emit_table(["theta", "abs_f", "bound", "practical_bound", "ok"], rows, args.out or "csv", cfg.digits)


def cmd_moments(args, cfg):
    from .moments import moment_table
    emit_object(moment_table().to_dict(14), args.out or "json", cfg.digits)


def _fform_obj(key: str, form) -> dict:
    return {"key": key, "order": form.order, "form": form.text(),
            "coefficients": json.dumps(form.coeff_lists())}


def cmd_fform(args, cfg):
    from . import fform_symbolic as fs
    if args.action == "u":
        emit_object(_fform_obj(f"u{args.j}{args.k}", fs.st_form(args.j, args.k)), args.out or "json", cfg.digits)
    elif args.action == "minor":
        rows = [int(x) for x in args.rows.split(",")]
        cols = [int(x) for x in args.cols.split(",")]
        try:
            form = fs.minor_fform(rows, cols)
        except fs.NoSolution as exc:
            emit_object({"rows": args.rows, "cols": args.cols, "no_solution": exc.reason},
                        args.out or "json", cfg.digits)
            return 1
        emit_object(_fform_obj(f"minor[{args.rows}|{args.cols}]", form), args.out or "json", cfg.digits)
    else:
        tab = fs.st_table(args.max)
        rows = [list(_fform_obj(f"u{j}{k}", f).values()) for (j, k), f in tab.items()]
        emit_table(["key", "order", "form", "coefficients"], rows, args.out or "json", cfg.digits)


def cmd_specfun(args, cfg):
    from .specfun import airy, bessel_j, format_poly, olver_tables
    if args.action == "olver":
        tab = olver_tables(args.kmax)
        for name, polys in (("A", tab.A), ("B", tab.B)):
            for k, p in enumerate(polys):
                print(f"{name}_{k}: {format_poly(p)}")
    elif args.action == "airy":
        emit_object({"x": args.x, "k": args.k, "value": airy(args.x, args.k)}, args.out or "json", cfg.digits)
    else:
        emit_object({"nu": args.nu, "x": args.x, "value": bessel_j(args.nu, args.x)}, args.out or "json", cfg.digits)


def cmd_kernels(args, cfg):
    import numpy as np
    from .kernels import default_grid, kernel_expansion_grid
    g = default_grid()
    X, Y = np.meshgrid(g, g, indexing="ij")
    R = kernel_expansion_grid(args.nu, X, Y, args.order)
    rows = [[x, y, r] for x, y, r in zip(X.ravel(), Y.ravel(), R.ravel())]
    emit_table(["x", "y", "residual"], rows, args.out or "csv", cfg.digits)


# --------------------------------------------------------------------------
# self test


def _quick_checks():
    import numpy as np

    from . import exact_lis, expansions, fform_symbolic, kernels, moments, quad_fredholm, specfun
    from . import depoisson, stirling, tracy_widom

    def close(a, b, tol):
        return abs(a - b) <= tol

    return [
        ("quad_fredholm: Gauss-Legendre integrates x^2 on [0,1]",
         lambda: close(float(np.dot(quad_fredholm.gauss_legendre(5, 0, 1).weights,
                                    quad_fredholm.gauss_legendre(5, 0, 1).nodes ** 2)), 1 / 3, 1e-14)),
        ("specfun: Ai(0)", lambda: close(specfun.airy(0.0), 0.355028053887817239, 1e-14)),
        ("specfun: J_1(0) = 0", lambda: specfun.bessel_j(1, 0.0) == 0.0),
        ("tracy_widom: F(6) close to 1", lambda: close(tracy_widom.F(6.0), 1.0, 1e-9)),
        ("kernels: Airy kernel is symmetric",
         lambda: close(kernels.airy_kernel()(0.3, -0.7), kernels.airy_kernel()(-0.7, 0.3), 1e-15)),
        ("expansions: t_nu(nu, r) = 0 at nu = 2 sqrt(r)", lambda: close(expansions.t_nu(20, 100.0), 0.0, 1e-14)),
        ("exact_lis: L_3 distribution", lambda: exact_lis.exact_dist(3).counts == (0, 1, 4, 1)),
        ("exact_lis: lis_length of the identity", lambda: exact_lis.lis_length(range(5)) == 5),
        ("exact_lis: P(0; l) = 1", lambda: close(exact_lis.poisson_gf(3, 0.0).real, 1.0, 1e-15)),
        ("depoisson: b_2(n) = -n/2", lambda: depoisson.charlier_b(2, 7) == Fraction(-7, 2)),
        ("stirling: tau_1 = e/sqrt(2 pi)", lambda: close(stirling.tau_n(1), math.e / math.sqrt(2 * math.pi), 1e-14)),
        ("stirling: S = 1 for l >= n", lambda: stirling.stirling_S(20, 25) == 1.0),
        ("moments: M_0 = 1", lambda: close(moments.moment_M(0), 1.0, 1e-9)),
        ("fform_symbolic: u00 has the form F'/F",
         lambda: fform_symbolic.st_form(0, 0).p == (fform_symbolic.ONE,)),
    ]


def _full_checks():
    from . import exact_lis, expansions, moments

    return [
        ("M_1 matches the reference value", lambda: abs(moments.moment_M(1) + 1.7710868074116016) <= 1e-8),
        ("Poissonization identity at r = 4, l = 4",
         lambda: abs(expansions.e2_hard(16.0, 4) - exact_lis.poisson_gf(4, 4.0).real) <= 1e-10),
        ("exact enumeration equals brute force for n = 7",
         lambda: exact_lis.exact_dist(7) == exact_lis.brute_force_dist(7)),
    ]


def cmd_selftest(args, cfg):
    checks = _quick_checks() + ([] if args.quick else _full_checks())
    failed = 0
    for name, fn in checks:
        try:
            ok = bool(fn())
        except Exception as exc:  # report and continue
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 1 if failed else 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lisdist", description=__doc__.splitlines()[0], allow_abbrev=False)
    p.add_argument("--m", type=int, help="quadrature nodes (default 80)")
    p.add_argument("--L", type=float, help="truncation length of infinite intervals (default 14)")
    p.add_argument("--tw-npts", type=int, dest="tw_npts", help="Chebyshev points of the F model")
    p.add_argument("--digits", type=int, help="significant digits of floating output")
    p.add_argument("--threads", type=int, help="worker threads (computations here run serially)")
    p.add_argument("--seed", type=int, help="default seed for Monte Carlo")
    sub = p.add_subparsers(dest="command", required=True)

    def action(parent, name, **kw):
        a = parent.add_parser(name, allow_abbrev=False, **kw)
        a.add_argument("--out", choices=("csv", "json"))
        return a

    tw = sub.add_parser("tw", allow_abbrev=False, help="Tracy-Widom distribution").add_subparsers(dest="action", required=True)
    a = action(tw, "eval")
    a.add_argument("--t", type=float, required=True)
    a.add_argument("--k", type=int, default=0)
    a = action(tw, "grid")
    a.add_argument("--a", type=float, required=True)
    a.add_argument("--b", type=float, required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--k", type=int, default=0)

    lis = sub.add_parser("lis", allow_abbrev=False, help="exact and sampled LIS distributions").add_subparsers(dest="action", required=True)
    a = action(lis, "exact")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--l", type=int)
    a = action(lis, "mc")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--samples", type=int, required=True)
    a.add_argument("--seed", type=int)

    po = sub.add_parser("poisson", allow_abbrev=False, help="Poisson generating function").add_subparsers(dest="action", required=True)
    a = action(po, "eval")
    a.add_argument("--z", required=True, help="real or complex, e.g. 4 or 3+2j")
    a.add_argument("--l", type=int, required=True)
    a.add_argument("--K", type=int, default=80)

    ex = sub.add_parser("expansion", allow_abbrev=False, help="finite-size expansions").add_subparsers(dest="action", required=True)
    a = action(ex, "figure")
    a.add_argument("--which", type=int, required=True, choices=range(1, 6))
    a.add_argument("--n", type=int)
    a = action(ex, "coeff")
    a.add_argument("--family", required=True)
    a.add_argument("--j", type=int, required=True)
    a.add_argument("--t", type=float, required=True)

    st = sub.add_parser("stirling", allow_abbrev=False, help="Stirling-type formulas").add_subparsers(dest="action", required=True)
    a = action(st, "eval")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--l", type=int, required=True)
    a.add_argument("--simplified", action="store_true")
    a.add_argument("--with-tau", action="store_true", dest="with_tau")

    dp = sub.add_parser("depoisson", allow_abbrev=False, help="de-Poissonization").add_subparsers(dest="action", required=True)
    a = action(dp, "jasz")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--l", type=int, required=True)
    a.add_argument("--M", type=int, default=4)
    a = action(dp, "sandwich")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--l", type=int, required=True)
    a.add_argument("--s", type=float, default=1.0)
    a = action(dp, "hayman")
    a.add_argument("--l", type=int, required=True)
    a.add_argument("--r", type=float, required=True)

    mo = sub.add_parser("moments", allow_abbrev=False, help="moments and expansion coefficients").add_subparsers(dest="action", required=True)
    action(mo, "table")

    ff = sub.add_parser("fform", allow_abbrev=False, help="symbolic linear F-forms").add_subparsers(dest="action", required=True)
    a = action(ff, "u")
    a.add_argument("--j", type=int, required=True)
    a.add_argument("--k", type=int, required=True)
    a = action(ff, "minor")
    a.add_argument("--rows", required=True)
    a.add_argument("--cols", required=True)
    a = action(ff, "table")
    a.add_argument("--max", type=int, default=8)

    sf = sub.add_parser("specfun", allow_abbrev=False, help="special functions").add_subparsers(dest="action", required=True)
    a = action(sf, "olver")
    a.add_argument("--kmax", type=int, default=3)
    a = action(sf, "airy")
    a.add_argument("--x", type=float, required=True)
    a.add_argument("--k", type=int, default=0)
    a = action(sf, "bessel")
    a.add_argument("--nu", type=int, required=True)
    a.add_argument("--x", type=float, required=True)

    ke = sub.add_parser("kernels", allow_abbrev=False, help="kernel expansions").add_subparsers(dest="action", required=True)
    a = action(ke, "residual")
    a.add_argument("--nu", type=int, required=True)
    a.add_argument("--m", type=int, default=2, dest="order")

    se = sub.add_parser("selftest", allow_abbrev=False, help="run built-in checks")
    se.add_argument("--quick", action="store_true")
    return p


COMMANDS = {
    "tw": cmd_tw, "lis": cmd_lis, "poisson": cmd_poisson, "expansion": cmd_expansion,
    "stirling": cmd_stirling, "depoisson": cmd_depoisson, "moments": cmd_moments,
    "fform": cmd_fform, "specfun": cmd_specfun, "kernels": cmd_kernels, "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(os.environ.get("LIS_CONFIG"))
        flags = {k: getattr(args, k) for k in ("m", "L", "tw_npts", "digits", "threads", "seed")
                 if getattr(args, k, None) is not None}
        cfg = replace(cfg, **flags).validate()
    except (DomainError, OSError) as exc:
        print(f"lisdist: {exc}", file=sys.stderr)
        return 2
    try:
        rc = COMMANDS[args.command](args, cfg)
    except DomainError as exc:
        print(f"lisdist: {exc}", file=sys.stderr)
        return 2
    except (LisdistError, ArithmeticError) as exc:
        print(f"lisdist: computation failed: {exc}", file=sys.stderr)
        return 1
    return int(rc or 0)


if __name__ == "__main__":
    sys.exit(main())
