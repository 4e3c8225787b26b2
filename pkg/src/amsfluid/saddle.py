"""Saddle-point equations, region boundary curves and region classification.

Every saddle equation is the theta-derivative of a real exponent:

    Theta   (minus branch)  d/dtheta [y t + mu(t) + eta(W-(t,z), t, z)] = 0
    Theta+  (plus branch)   same with W+
    Theta0                  d/dtheta Psi0(y, t) = 0
    Theta1                  y + mu'(t) = 0

Because eta_w vanishes at W, the total derivative along W(t) equals the
partial one, so the exponent is differentiated as a function of t alone.
Roots are bracketed from the monotonicity of these derivatives and polished
with Brent's method.
"""

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from . import errors
from . import kernel as K
from ._numdiff import derivative
from .errors import AmsError
from .model import as_derived

ROOT_TOL = 1e-9
COALESCENCE_TOL = 1e-4


@dataclass(frozen=True)
class SaddleRoot:
    value: float
    residual: float
    flags: tuple = ()

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class CurveValues:
    y0: float
    y1: float = None
    ystar: float = None
    y2: float = None


REGION_TAGS = ("R1", "R2", "R3", "I", "II", "III", "IV", "V", "VI", "VII", "VIII")


@dataclass(frozen=True)
class Region:
    tag: str
    saddle_value: float = None
    distance_to_boundary: float = math.inf
    flags: tuple = field(default_factory=tuple)


# -- curves ---------------------------------------------------------------

def zmax(p):
    """Upper end gamma^2/delta of the z-range where the saddles can coalesce."""
    p = as_derived(p)
    return p.gamma ** 2 / p.delta


def Y0(p, z):
    p = as_derived(p)
    lam, g, rho = p.lam, p.gamma, p.rho
    return (z - g) / (lam + 1) - rho / (lam + 1) ** 2 * math.log((z * lam + z - lam) / rho)


def Y1(p, z):
    p = as_derived(p)
    g, rho, delta = p.gamma, p.rho, p.delta
    if not g <= z < zmax(p):
        return None
    gg = g * (1 - g)
    u = (g * g - delta * z) / (gg * rho)
    return gg ** 2 * rho / delta ** 2 * (u - math.log(u) - 1)


def Y2(p, z):
    p = as_derived(p)
    lam, g, rho = p.lam, p.gamma, p.rho
    zeta = lam ** 2 * (g - 1) + 2 * lam - g
    L = z * lam + z - lam
    dz = z - g
    return (2 * zeta / (lam + 1) ** 4 * math.log(L / rho)
            - dz * (2 * rho * zeta + 3 * (lam + 1) * zeta * dz + (lam - 1) * (lam + 1) ** 2 * dz ** 2)
            / (L ** 2 * (lam + 1) ** 3))


def eta_theta(p, w, t, z):
    """Partial theta-derivative of eta at fixed w."""
    p = as_derived(p)
    step = max(0.45 * abs(t - p.theta0), 1e-9)
    return derivative(lambda u: K.eta(p, w, u, z), t, 1, h0=min(0.05 * max(1, abs(t)), step),
                      max_step=step)[0]


def Ystar(p, z):
    p = as_derived(p)
    if not p.gamma < z < zmax(p):
        return None
    ts = K.theta_star(p, z)
    w = math.sqrt(p.lam * (1 - z) / z)
    return -K.mu_d1(p, ts) - eta_theta(p, w, ts, z)


def curves(p, z):
    p = as_derived(p)
    if not 0 < z <= 1:
        raise AmsError(errors.DOMAIN, f"curves need 0 < z <= 1, got {z!r}")
    if z * p.lam + z - p.lam <= 0:
        y0 = None
    else:
        y0 = Y0(p, z)
    y2 = Y2(p, z) if z * p.lam + z - p.lam > 0 else None
    return CurveValues(y0=y0, y1=Y1(p, z), ystar=Ystar(p, z), y2=y2)


def solve_ystar(p, y, tol=1e-13):
    """z in (gamma, gamma^2/delta) with Y*(z) = y."""
    p = as_derived(p)
    a, b = p.gamma + 1e-9, zmax(p) - 1e-9
    f = lambda z: Ystar(p, z) - y
    fa, fb = f(a), f(b)
    if fa * fb > 0:
        raise AmsError(errors.NO_CONVERGENCE, f"Y*(z) = {y!r} has no root in ({a!r}, {b!r})")
    return brentq(f, a, b, xtol=tol)


# -- saddle equations ------------------------------------------------------

def _sing_points(p, z, branch):
    pts = []
    if branch != "minus":
        pts.append(p.theta0)
    if p.gamma < z < zmax(p):
        pts.append(K.theta_star(p, z))
    return pts


def _stepper(pts, t):
    dist = min((abs(t - s) for s in pts), default=math.inf)
    step = max(0.45 * dist, 1e-10)
    return min(0.05 * max(1.0, abs(t)), step), step


def saddle_fn(p, y, z, branch):
    """theta -> dPsi/dtheta along the chosen w-saddle.

    eta_w vanishes on the saddle, so the total derivative is the partial one
    at fixed w. Differentiating at fixed w keeps the stencil away from the
    square-root branch point of W(theta) where the saddles coalesce.
    """
    p = as_derived(p)

    def s(t):
        w = K.saddle_w_branch(p, t, z, branch)
        return y + K.mu_d1(p, t) + eta_theta(p, w, t, z)

    return s


def psi_tt(p, y, t, z, branch):
    """Total second theta-derivative of Psi along W(theta)."""
    p = as_derived(p)
    h0, step = _stepper(_sing_points(p, z, branch), t)
    return derivative(lambda u: K.psi_along(p, y, u, z, branch), t, 2, h0=h0, max_step=step)[0]


def psi0_tt(p, y, t):
    p = as_derived(p)
    h0, step = _stepper([p.theta0], t)
    return derivative(lambda u: K.psi0(p, y, u), t, 2, h0=h0, max_step=step)[0]


def psi0_t(p, y, t):
    p = as_derived(p)
    h0, step = _stepper([p.theta0], t)
    return derivative(lambda u: K.psi0(p, y, u), t, 1, h0=h0, max_step=step)[0]


def _brent(f, a, b):
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise AmsError(errors.NO_CONVERGENCE, f"no sign change on [{a!r}, {b!r}]")
    return brentq(f, a, b, xtol=1e-14, maxiter=200)


def _finish(f, root, flags=()):
    r = f(root)
    if not abs(r) < ROOT_TOL:
        raise AmsError(errors.NO_CONVERGENCE, f"residual {r!r} at root {root!r}")
    return SaddleRoot(root, r, tuple(flags))


def _expand(f, start, direction, want_positive, limit=1e6):
    t, step = start, 1.0
    while abs(t) < limit:
        try:
            v = f(t)
        except AmsError:
            v = None
        if v is not None and (v > 0) == want_positive:
            return t
        t += direction * step
        step *= 2
    raise AmsError(errors.NO_CONVERGENCE, "could not bracket the saddle")


def _near_theta0(f, p, side, want_positive):
    """Point just beside theta0 where f has the wanted sign."""
    eps = 1e-3 * abs(p.theta0)
    while eps > 1e-13 * abs(p.theta0):
        t = p.theta0 + side * eps
        v = f(t)
        if (v > 0) == want_positive:
            return t
        eps /= 10
    raise AmsError(errors.NO_CONVERGENCE, "no sign change next to theta0")


def _coalescence(p, y, z, ts):
    ys = Ystar(p, z)
    return ys, abs(y - ys) < COALESCENCE_TOL


def solve_theta(p, y, z):
    """Minus-branch saddle Theta(y, z) for gamma < z <= 1 and y <= Y*(z)."""
    p = as_derived(p)
    if not p.gamma < z <= 1:
        raise AmsError(errors.OUT_OF_REGION, f"Theta needs gamma < z <= 1, got z={z!r}")
    s = saddle_fn(p, y, z, "minus")
    s0 = y - Y0(p, z)
    if abs(s0) < 1e-15:
        return SaddleRoot(0.0, s0)
    if s0 < 0:
        hi = _expand(s, 1.0, +1, True)
        return _finish(s, _brent(s, 0.0, hi))
    if p.gamma < z < zmax(p):
        ts = K.theta_star(p, z)
        ys, near = _coalescence(p, y, z, ts)
        if near:
            return SaddleRoot(ts, y - ys, (errors.NEAR_COALESCENCE,))
        if y > ys:
            raise AmsError(errors.OUT_OF_REGION, f"y={y!r} is beyond Y*(z)={ys!r}; use the plus branch")
        lo = ts + 1e-9 * max(1.0, abs(ts))
        return _finish(s, _brent(s, lo, 0.0))
    lo = _expand(s, -1.0, -1, False)
    return _finish(s, _brent(s, lo, 0.0))


def solve_theta_plus(p, y, z):
    """Plus-branch saddle Theta+(y, z) for z <= gamma, or gamma < z < gamma^2/delta with y >= Y*(z)."""
    p = as_derived(p)
    if not 0 < z < zmax(p):
        raise AmsError(errors.OUT_OF_REGION, f"Theta+ needs 0 < z < gamma^2/delta, got z={z!r}")
    s = saddle_fn(p, y, z, "plus")
    if z > p.gamma:
        ts = K.theta_star(p, z)
        ys, near = _coalescence(p, y, z, ts)
        if near:
            return SaddleRoot(ts, y - ys, (errors.NEAR_COALESCENCE,))
        if y < ys:
            raise AmsError(errors.OUT_OF_REGION, f"y={y!r} is below Y*(z)={ys!r}; use the minus branch")
        lo = ts + 1e-9 * max(1.0, abs(ts))
    else:
        lo = _expand(s, p.theta0 - 1.0, -1, True)
    hi = _near_theta0(s, p, -1, False)
    return _finish(s, _brent(s, lo, hi))


def solve_theta0(p, y):
    """Root of dPsi0/dtheta in (Theta+(0,0), theta0)."""
    p = as_derived(p)
    if y < 0:
        raise AmsError(errors.DOMAIN, "Theta0 needs y >= 0")
    f = lambda t: psi0_t(p, y, t)
    lo = _expand(f, p.theta0 - 1.0, -1, True)
    hi = _near_theta0(f, p, -1, False)
    return _finish(f, _brent(f, lo, hi))


def solve_theta1(p, y):
    """Root of y + mu'(theta) = 0 on (theta0, inf)."""
    p = as_derived(p)
    if y <= 0:
        raise AmsError(errors.DOMAIN, "Theta1 needs y > 0")
    f = lambda t: y + K.mu_d1(p, t)
    y01 = Y0(p, 1.0)
    if abs(y - y01) < 1e-15:
        return SaddleRoot(0.0, 0.0)
    if y < y01:
        lo, hi = 0.0, _expand(f, 1.0, +1, True)
    else:
        lo, hi = _near_theta0(f, p, +1, False), 0.0
    return _finish(f, _brent(f, lo, hi))


# -- classification ----------------------------------------------------------

@dataclass(frozen=True)
class LayerWidths:
    """Widths of the boundary, corner and transition layers, in units of 1/N or 1/sqrt(N)."""

    transition_sd: float = 3.0   # Region II and V half-width in standard deviations sqrt(Y2/N)
    z_strip: float = 1.0         # z-strip at z=0, z=1 and around z=gamma, times 1/N
    y_strip: float = 1.0         # y-strip at y=0, times 1/N


def classify(p, y, z, N=None, widths=None, with_saddle=False):
    p = as_derived(p)
    N = p.N if N is None else N
    w = widths or LayerWidths()
    if not (y >= 0 and 0 <= z <= 1):
        raise AmsError(errors.DOMAIN, f"classify needs y >= 0 and 0 <= z <= 1, got ({y!r}, {z!r})")
    zw, yw = w.z_strip / N, w.y_strip / N
    tag, dist = _tag(p, y, z, N, w, zw, yw)
    saddle = None
    flags = ()
    if with_saddle:
        try:
            saddle, flags = _saddle_for(p, tag, y, z, N)
        except AmsError as exc:
            flags = (exc.code,)
    return Region(tag, saddle, dist, flags)


def _tag(p, y, z, N, w, zw, yw):
    g = p.gamma
    y01 = Y0(p, 1.0)
    if z >= 1 - zw:
        if y < yw:
            return "VIII", min(yw - y, z - (1 - zw))
        band = w.transition_sd * math.sqrt(Y2(p, 1.0) / N)
        if abs(y - y01) <= band:
            return "V", band - abs(y - y01)
        return ("IV" if y < y01 else "VI"), abs(y - y01) - band
    if abs(z - g) <= zw and y < yw:
        return "I", min(zw - abs(z - g), yw - y)
    if z <= zw:
        return "III", zw - z
    if z > g and y < yw:
        return "VII", min(yw - y, z - g - zw, 1 - zw - z)
    if z > g:
        y0 = Y0(p, z)
        band = w.transition_sd * math.sqrt(Y2(p, z) / N)
        if abs(y - y0) <= band and g + zw < z < 1 - zw:
            return "II", band - abs(y - y0)
        if y < y0:
            return "R1", y0 - y
        if z < zmax(p):
            ys = Ystar(p, z)
            if y <= ys:
                return "R2", min(y - y0, ys - y)
            return "R3", y - ys
        return "R2", y - y0
    return "R3", g - z


def _saddle_for(p, tag, y, z, N):
    if tag in ("R1", "R2"):
        r = solve_theta(p, y, z)
    elif tag == "R3":
        r = solve_theta_plus(p, y, z)
    elif tag == "III":
        r = solve_theta0(p, y)
    elif tag in ("IV", "VI"):
        r = solve_theta1(p, y)
    elif tag == "VII":
        return (z - p.gamma) / (y * N), ()
    elif tag == "VIII":
        return (1 - p.gamma) / (y * N), ()
    else:
        return None, ()
    return r.value, r.flags
