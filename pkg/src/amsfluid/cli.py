"""Command-line front end.

Parameters come from flags, then AMSFLUID_* environment variables, then a
key=value config file (``--config``), in that order of precedence. Any option
of the chosen subcommand can be set this way, e.g. ``AMSFLUID_LAMBDA=0.01``
or ``x_grid = 0.5,1,2`` in the file.

Exit status: 0 on success, 2 on usage or parameter errors, 1 on numeric
failures (the reason code is printed on stderr).
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import approx as A
from . import conditional as C
from . import kernel as K
from . import reproduce as R
from . import saddle as S
from . import simulate as M
from .errors import AmsError
from .model import ModelParams, derive_params, validate
from .spectral import SpectralSolution

SCHEMA = 1
ENV_PREFIX = "AMSFLUID_"


class UsageError(Exception):
    pass


# -- value parsing -----------------------------------------------------------------

def _floats(text):
    """Comma list and/or a:b:n linspace ranges."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise argparse.ArgumentTypeError(f"range {part!r} must be start:stop:count")
            out.extend(np.linspace(float(bits[0]), float(bits[1]), int(bits[2])).tolist())
        else:
            out.append(float(part))
    return out


def _ints(text):
    """Comma list and/or a:b inclusive ranges."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            a, b = part.split(":")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return ""
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) or math.isinf(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


# -- output ----------------------------------------------------------------------

def emit(rows, command, fmt, out, extra=None):
    """Write rows as CSV (with a versioned comment header) or JSON."""
    cols = []
    for r in rows:
        for key in r:
            if key not in cols:
                cols.append(key)
    if fmt == "json":
        doc = {"schema": SCHEMA, "version": __version__, "command": command,
               "rows": [{c: _json_value(r.get(c)) for c in cols} for r in rows]}
        if extra:
            doc.update({k: _json_value(v) for k, v in extra.items()})
        out.write(json.dumps(doc, indent=1) + "\n")
        return
    out.write(f"# amsfluid {__version__} command={command} schema={SCHEMA}\n")
    for key, val in (extra or {}).items():
        out.write(f"# {key}: {json.dumps(val)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in cols])


def _echo(p):
    return {"N": p.N, "lambda": p.lam, "c": p.c}


# -- subcommands -----------------------------------------------------------------

def cmd_params(p, args):
    rows = [{"name": k, "value": getattr(p, k)} for k in
            ("N", "lam", "c", "gamma", "rho", "phi", "delta", "alpha", "beta", "theta0", "epsilon", "c_floor")]
    rows.append({"name": "zmax", "value": S.zmax(p)})
    rows.append({"name": "Y0(1)", "value": S.Y0(p, 1.0)})
    return rows, None


def _kx_points(p, args):
    if args.z is not None or args.y is not None:
        if args.z is None or args.y is None:
            raise UsageError("--z and --y go together")
        return [(round(z * p.N), y * p.N) for z in args.z for y in args.y]
    if args.k is None or args.x is None:
        raise UsageError("give --k and --x (or --z and --y)")
    return [(k, x) for k in args.k for x in args.x]


def _row(p, command, k, x):
    r = {"command": command}
    r.update(_echo(p))
    r.update({"k": k, "x": x, "y": x / p.N, "z": k / p.N})
    return r


def cmd_exact(p, args):
    sol = SpectralSolution(p, precision=args.precision)
    rows = []
    for k, x in _kx_points(p, args):
        F = sol.cdf_detail(k, x)
        f = sol.density_detail(k, x) if x > 0 else None
        r = _row(p, "exact", k, x)
        r.update({"F_exact": F.value, "f_exact": f.value if f else None,
                  "digits_lost": max(F.digits_lost, f.digits_lost if f else 0.0),
                  "flags": ";".join(sorted(set(F.flags + (f.flags if f else ()))))})
        rows.append(r)
    return rows, None


ALL_TAGS = ("R1", "R2", "R3", "I", "II", "III", "IV", "V", "VI", "VII", "VIII")


def cmd_asymptotic(p, args):
    sol = SpectralSolution(p, precision="auto") if args.compare_exact else None
    rows = []
    for k, x in _kx_points(p, args):
        tags = ALL_TAGS if args.all_regions else (args.region,)
        for tag in tags:
            r = _row(p, "asymptotic", k, x)
            try:
                res = A.evaluate(p, tag, k, x) if tag else A.density_approx(p, k, x)
                r.update({"region": tag or res.region.tag, "saddle": res.region.saddle_value,
                          "F_approx": res.F_approx, "f_approx": res.f_approx,
                          "is_deviation": res.is_deviation, "flags": ";".join(res.flags)})
            except AmsError as exc:
                if not args.all_regions:
                    raise
                r.update({"region": tag, "flags": exc.code})
            if sol is not None and x > 0:
                ex = sol.density(k, x)
                r["exact"] = ex
                fa = r.get("f_approx")
                r["relative_gap"] = (fa - ex) / ex if fa is not None and ex else None
            rows.append(r)
    return rows, None


def cmd_curves(p, args):
    zs = args.z or np.linspace(p.gamma, 1.0, 41).tolist()
    rows = []
    for z in zs:
        cv = S.curves(p, z)
        rows.append({"z": z, "y0": cv.y0, "y1": cv.y1, "ystar": cv.ystar, "y2": cv.y2})
    return rows, None


def cmd_classify(p, args):
    if args.y is None or args.z is None:
        raise UsageError("classify needs --y and --z")
    widths = S.LayerWidths(args.transition_sd, args.z_strip, args.y_strip)
    rows = []
    for z in args.z:
        for y in args.y:
            reg = S.classify(p, y, z, widths=widths, with_saddle=True)
            rows.append({"y": y, "z": z, "region": reg.tag, "saddle": reg.saddle_value,
                         "distance_to_boundary": reg.distance_to_boundary, "flags": ";".join(reg.flags)})
    return rows, None


KERNEL_FUNCS = {
    "Delta": lambda p, t, z: K.Delta(p, t),
    "V": lambda p, t, z: K.branch_kernel(p, t).V,
    "R1": lambda p, t, z: K.branch_kernel(p, t).R1,
    "R2": lambda p, t, z: K.branch_kernel(p, t).R2,
    "mu": lambda p, t, z: K.mu(p, t),
    "mu_d1": lambda p, t, z: K.mu_d1(p, t),
    "mu_d2": lambda p, t, z: K.mu_d2(p, t),
    "disc": lambda p, t, z: K.disc(p, t, z),
    "w_minus": lambda p, t, z: K.saddle_w(p, t, z).w_minus,
    "w_plus": lambda p, t, z: K.saddle_w(p, t, z).w_plus,
    "eta_ww_minus": lambda p, t, z: K.eta_ww(p, "minus", t, z),
    "eta_ww_plus": lambda p, t, z: K.eta_ww(p, "plus", t, z),
    "psi0": lambda p, t, z: K.psi0(p, 0.0, t),
    "product_fixed": lambda p, t, z: K.product_fixed(p, t),
    "product_exact": lambda p, t, z: float(K.product_exact(p, t)),
}


def cmd_kernel_dump(p, args):
    names = args.function or list(KERNEL_FUNCS)
    for n in names:
        if n not in KERNEL_FUNCS:
            raise UsageError(f"unknown function {n!r}; choose from {', '.join(KERNEL_FUNCS)}")
    thetas = args.theta or np.linspace(p.theta0 + 0.01, 5.0, 60).tolist()
    z = args.z[0] if args.z else 0.6
    rows = []
    for t in thetas:
        r = {"theta": t, "z": z}
        for n in names:
            try:
                r[n] = KERNEL_FUNCS[n](p, t, z)
            except (AmsError, ValueError):
                r[n] = None
        rows.append(r)
    return rows, None


def _law_dict(law):
    d = {"kind": law.kind, "variable": law.variable, "location": law.location, "scale": law.scale,
         "truncation": law.truncation}
    if law.mixture_terms:
        d["mixture_terms"] = [list(t) for t in law.mixture_terms]
    return {k: _json_value(v) for k, v in d.items()}


def cmd_conditional(p, args):
    if not args.given or "=" not in args.given:
        raise UsageError("--given must be buffer=X or sources=K")
    what, val = args.given.split("=", 1)
    if what == "buffer":
        law = C.sources_given_buffer(p, float(val))
        if law.kind == C.DISCRETE_BESSEL_MIXTURE:
            rows = [{"k": p.c_floor + l, "l": l, "probability": w} for w, l in law.mixture_terms]
        else:
            ks = np.arange(max(0, math.floor(law.location - 5 * law.scale)),
                           min(p.N, math.ceil(law.location + 5 * law.scale)) + 1)
            rows = [{"k": int(k), "density": law.pdf(float(k))} for k in ks]
    elif what == "sources":
        law = C.buffer_given_sources(p, int(val))
        if law.kind == C.GAUSSIAN:
            vs = np.linspace(max(0.0, law.location - 5 * law.scale), law.location + 5 * law.scale, 101)
        elif law.kind == C.EXPONENTIAL:
            vs = np.linspace(0.0, 8 * law.scale, 101)
        else:
            vs = np.linspace(0.0, 20.0, 101)
        rows = [{law.variable: float(v), "density": law.pdf(float(v))} for v in vs]
    else:
        raise UsageError("--given must be buffer=X or sources=K")
    return rows, {"law": _law_dict(law)}


def cmd_simulate(p, args):
    cfg = M.SimConfig(horizon=args.horizon, replications=args.reps, seed=args.seed,
                      x_grid=tuple(sorted(args.x_grid)), confidence=args.confidence)
    est = M.run(p, cfg)
    sol = SpectralSolution(p) if args.compare_exact else None
    rows = []
    for k in range(p.N + 1):
        for g, x in enumerate(est.x_grid):
            r = {"k": k, "x": float(x), "estimate": est.joint[k, g], "half_width": est.half_widths[k, g],
                 "lower": est.lower[k, g], "upper": est.upper[k, g], "sojourns": int(est.sojourns[k])}
            if sol is not None:
                r["exact"] = sol.cdf(k, float(x))
            rows.append(r)
    extra = None
    if sol is not None:
        rep = M.compare(est, sol)
        extra = {"report": {"coverage": rep.coverage, "coverage_plain": rep.coverage_plain, "cells": rep.cells,
                            "max_scaled_deviation": _json_value(rep.max_scaled_deviation)}}
    return rows, extra


def cmd_tables(p, args):
    sol = SpectralSolution(p)
    t1 = [dict(table=1, **r) for r in R.table1(p, solution=sol)]
    t2 = [dict(table=2, **r) for r in R.table2(p, solution=sol)]
    if args.out and os.path.isdir(args.out):
        _write(os.path.join(args.out, "table1.csv"), t1, "tables", args.format)
        _write(os.path.join(args.out, "table2.csv"), t2, "tables", args.format)
        for name, rows in R.figures(p).items():
            _write(os.path.join(args.out, f"fig_{name}.csv"), rows, "tables", args.format)
        return None, None
    return t1 + t2, None


def _write(path, rows, command, fmt, extra=None):
    with open(path, "w", newline="") as fh:
        emit(rows, command, fmt, fh, extra)


COMMANDS = {
    "params": cmd_params, "exact": cmd_exact, "asymptotic": cmd_asymptotic, "curves": cmd_curves,
    "classify": cmd_classify, "kernel-dump": cmd_kernel_dump, "conditional": cmd_conditional,
    "simulate": cmd_simulate, "tables": cmd_tables,
}


# -- parser ------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--n", type=int, help="number of sources")
    g.add_argument("--lambda", dest="lam", type=float, help="off-to-on rate")
    g.add_argument("--c", type=float, help="drain rate")
    g.add_argument("--gamma", type=float, help="c/N (alternative to --c)")
    common.add_argument("--config", "--params-from-file", dest="config", help="key=value file")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (tables: a directory for all data sets)")

    parser = argparse.ArgumentParser(prog="amsfluid", description="On-off fluid queue: exact, asymptotic and simulated.")
    parser.add_argument("--version", action="version", version=f"amsfluid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    add("params", "derived parameters")

    pe = add("exact", "exact F_k(x) and f_k(x)")
    pa = add("asymptotic", "asymptotic approximations")
    for sp in (pe, pa):
        sp.add_argument("--k", type=_ints)
        sp.add_argument("--x", type=_floats)
        sp.add_argument("--z", type=_floats)
        sp.add_argument("--y", type=_floats)
    pe.add_argument("--precision", choices=("double", "double-double", "auto"), default="double")
    pa.add_argument("--region", choices=ALL_TAGS)
    pa.add_argument("--all-regions", action="store_true")
    pa.add_argument("--compare-exact", action="store_true")

    pc = add("curves", "region boundary curves")
    pc.add_argument("--z", type=_floats)

    pk = add("classify", "region of scaled points")
    pk.add_argument("--y", type=_floats)
    pk.add_argument("--z", type=_floats)
    pk.add_argument("--transition-sd", type=float, default=3.0)
    pk.add_argument("--z-strip", type=float, default=1.0)
    pk.add_argument("--y-strip", type=float, default=1.0)

    pd = add("kernel-dump", "tabulate kernel functions over theta")
    pd.add_argument("--function", action="append")
    pd.add_argument("--theta", type=_floats)
    pd.add_argument("--z", type=_floats)

    pq = add("conditional", "conditional limit laws")
    pq.add_argument("--given", help="buffer=X or sources=K")

    ps = add("simulate", "Monte Carlo estimate of P[Z=k, X<=x]")
    ps.add_argument("--horizon", type=float, default=1e6)
    ps.add_argument("--reps", type=int, default=32)
    ps.add_argument("--seed", type=int, default=12345)
    ps.add_argument("--x-grid", type=_floats, default=[0.25, 0.5, 1.0, 2.0, 4.0])
    ps.add_argument("--confidence", type=float, default=0.99)
    ps.add_argument("--compare-exact", action="store_true")

    add("tables", "reference tables and figure data")
    return parser


def read_config(path):
    vals = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            key, val = line.split("=", 1)
            vals[key.strip().lower().replace("-", "_")] = val.strip()
    return vals


_ALIASES = {"lambda": "lam"}


def _apply_defaults(subparser, values):
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        dest = _ALIASES.get(key, key)
        if dest not in actions or dest in ("help", "config"):
            continue
        act = actions[dest]
        if act.nargs == 0:
            defaults[dest] = raw.lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            defaults[dest] = act.type(raw)
        else:
            defaults[dest] = raw
    subparser.set_defaults(**defaults)


def parse(argv, environ=None):
    environ = os.environ if environ is None else environ
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    layered = {}
    if args.config:
        try:
            layered.update(read_config(args.config))
        except (OSError, UsageError) as exc:
            parser.error(f"cannot read config: {exc}")
    for key, val in environ.items():
        if key.startswith(ENV_PREFIX):
            layered[key[len(ENV_PREFIX):].lower()] = val
    try:
        _apply_defaults(sub, layered)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        parser.error(f"bad config or environment value: {exc}")
    args = parser.parse_args(argv)
    if args.n is None or args.lam is None or (args.c is None and args.gamma is None):
        sub.error("model parameters --n, --lambda and one of --c/--gamma are required")
    if args.c is not None and args.gamma is not None:
        sub.error("give --c or --gamma, not both")
    return parser, sub, args


def main(argv=None, environ=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser, sub, args = parse(argv, environ)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    raw = ModelParams.from_gamma(args.n, args.lam, args.gamma) if args.gamma is not None else \
        ModelParams(args.n, args.lam, args.c)
    v = validate(raw)
    if not v.ok:
        sys.stderr.write(f"amsfluid: {v.code}: {v.message}\n")
        return 2
    p = derive_params(raw)
    try:
        rows, extra = COMMANDS[args.command](p, args)
    except UsageError as exc:
        sub.print_usage(sys.stderr)
        sys.stderr.write(f"amsfluid {args.command}: error: {exc}\n")
        return 2
    except AmsError as exc:
        sys.stderr.write(f"amsfluid: {exc.code}: {exc}\n")
        return 1
    if rows is None:
        return 0
    if args.out:
        _write(args.out, rows, args.command, args.format, extra)
    else:
        buf = io.StringIO()
        emit(rows, args.command, args.format, buf, extra)
        sys.stdout.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
