"""Table and figure data at the reference configuration (or any other).

The low-k table covers k = 0..9 at x = 1 with the Region III column (k <= 6) and
the plus-branch interior column (k >= 1). The high-k table covers k = 10..N with the
minus-branch interior column (k <= N-1) and the z=1 boundary column
(k >= N-4). Every asymptotic entry is a density: saddle times the F formula.
"""

import math

import numpy as np

from . import approx as A
from . import saddle as S
from .errors import AmsError
from .model import as_derived
from .spectral import SpectralSolution


def _safe(fn):
    try:
        return fn()
    except AmsError:
        return math.nan


def table1(p, x=1.0, solution=None):
    p = as_derived(p)
    sol = solution or SpectralSolution(p)
    y = x / p.N
    rows = []
    for k in range(0, p.c_floor + 3):
        z = k / p.N
        if k == 0:
            theta = S.solve_theta0(p, y).value
        else:
            theta = _safe(lambda: S.solve_theta_plus(p, y, z).value)
        rows.append(dict(
            k=k, theta=theta, exact=sol.density(k, x),
            theta0_F3=_safe(lambda: A.boundary_III(p, k, y).f_approx) if k <= p.c_floor - 1 else math.nan,
            thetaplus_G2=_safe(lambda: A.interior_G2(p, y, z).f_approx) if k >= 1 else math.nan,
        ))
    return rows


def table2(p, x=1.0, solution=None):
    p = as_derived(p)
    sol = solution or SpectralSolution(p)
    y, N = x / p.N, p.N
    rows = []
    for k in range(p.c_floor + 3, N + 1):
        z = k / N
        rows.append(dict(
            k=k, theta=_safe(lambda: S.solve_theta(p, y, z).value), exact=sol.density(k, x),
            theta_G1=_safe(lambda: A.interior_G1(p, y, z).f_approx) if k < N else math.nan,
            theta1_F4=_safe(lambda: A.boundary_IV(p, N - k, y).f_approx) if k >= N - 4 else math.nan,
        ))
    return rows


def _sweep(p, sol, k, xs, formula):
    rows = []
    for x in xs:
        rows.append(dict(k=k, x=float(x), exact=sol.density(k, float(x)),
                         approx=_safe(lambda: formula(float(x)).f_approx)))
    return rows


def figures(p, solution=None):
    """Figure data sets keyed by name; each is a list of row dicts."""
    p = as_derived(p)
    # the x=0.001 sweep cancels badly in double precision
    sol = solution or SpectralSolution(p, precision="auto")
    N = p.N
    out = {}
    xs = np.linspace(0.05, 8.0, 160)
    out["density_k17"] = _sweep(p, sol, 17, xs, lambda x: A.interior_G1(p, x / N, 17 / N))
    out["density_k3"] = _sweep(p, sol, 3, xs, lambda x: A.interior_G2(p, x / N, 3 / N))
    out["density_k0"] = _sweep(p, sol, 0, xs, lambda x: A.boundary_III(p, 0, x / N))
    top = _sweep(p, sol, N, xs, lambda x: A.boundary_IV(p, 0, x / N))
    for r in top:
        r["log_exact"] = math.log(r["exact"]) if r["exact"] > 0 else math.nan
        r["log_approx"] = math.log(r["approx"]) if r["approx"] > 0 else math.nan
    out["log_density_z1"] = top
    rows = []
    for k in range(p.c_floor + 1, N + 1):
        ex = sol.density_detail(k, 0.001)
        ap = _safe(lambda: A.boundary_VII(p, 0.001, k / N).f_approx) if k < N else math.nan
        rows.append(dict(k=k, x=0.001, exact=ex.value, approx=ap,
                         log_exact=math.log(ex.value) if ex.value > 0 else math.nan,
                         log_approx=math.log(ap) if ap > 0 else math.nan, flags=";".join(ex.flags)))
    out["log_density_x0001"] = rows
    rows = []
    for k in range(1, N):
        z = k / N
        g1 = _safe(lambda: A.interior_G1(p, 5.0 / N, z).f_approx) if z > p.gamma else math.nan
        g2 = _safe(lambda: A.interior_G2(p, 5.0 / N, z).f_approx) if z < S.zmax(p) else math.nan
        rows.append(dict(k=k, x=5.0, exact=sol.density(k, 5.0), theta_G1=g1, thetaplus_G2=g2))
    out["density_x5"] = rows
    return out


def argmax_density(p, k, lo, hi, formula="G1", tol=1e-6):
    """x maximising an asymptotic density at fixed k by golden-section search."""
    from scipy.optimize import minimize_scalar

    p = as_derived(p)
    z = k / p.N

    def g(x):
        if formula == "G1":
            return -A.interior_G1(p, x / p.N, z).f_approx
        return -A.density_approx(p, k, x).f_approx

    def f(x):
        try:
            return g(x)
        except AmsError:
            # the G1 amplitude is 0/0 exactly on y = Y0(z); step off it
            return g(x * (1 + 1e-7))

    r = minimize_scalar(f, bounds=(lo, hi), method="bounded", options=dict(xatol=tol))
    return float(r.x)
