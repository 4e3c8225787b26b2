"""Pointwise ingredients of the asymptotic formulas.

All functions take derived parameters ``p`` first and work on real scalars.

Logarithms of negative arguments show up along the real saddle paths used by
the boundary and R3 formulas (mu below theta0, 1 - R1*w beyond the branch
point). ``strict=True`` rejects them; the default modulus mode evaluates
ln|.| and leaves sign bookkeeping to the caller, which is what keeps the
amplitude formulas real-valued.
"""

import math
from dataclasses import dataclass

from . import errors
from ._numdiff import derivative
from .errors import AmsError
from .model import as_derived
from .signedlog import SignedLogReal


@dataclass(frozen=True)
class KernelBundle:
    theta: float
    Delta: float
    V: float
    R1: float
    R2: float


@dataclass(frozen=True)
class WSaddles:
    w_minus: float
    w_plus: float
    disc: float


def Delta(p, t):
    return math.sqrt((t + 1 - p.lam) ** 2 + 4 * p.lam)


def branch_kernel(p, t):
    p = as_derived(p)
    lam, g = p.lam, p.gamma
    d = Delta(p, t)
    return KernelBundle(
        theta=t, Delta=d,
        V=0.5 * (1 + ((2 * g - 1) * t - lam - 1) / d),
        R1=(d + (lam - 1 - t)) / (2 * lam),
        R2=(d - (lam - 1 - t)) / (2 * lam),
    )


def disc(p, t, z):
    p = as_derived(p)
    lam, g, rho, phi = p.lam, p.gamma, p.rho, p.phi
    dz = z - g
    return rho * rho + (2 * (lam + 1) * rho + 2 * phi * t) * dz + ((lam + 1) ** 2 + 2 * (1 - lam) * t + t * t) * dz * dz


def saddle_w(p, t, z, tol=1e-14):
    p = as_derived(p)
    if z == 0:
        raise AmsError(errors.DOMAIN, "saddle points need z != 0")
    D = disc(p, t, z)
    if D < 0:
        if D > -tol * (1 + t * t):
            D = 0.0
        else:
            raise AmsError(errors.COMPLEX, f"D({t!r}, {z!r}) = {D!r} < 0")
    base = (t + 1 - p.lam) / 2
    r = math.sqrt(D)
    return WSaddles(base + (p.lam - p.gamma * t - r) / (2 * z),
                    base + (p.lam - p.gamma * t + r) / (2 * z), D)


def saddle_w_branch(p, t, z, branch):
    s = saddle_w(p, t, z)
    return s.w_plus if branch == "plus" else s.w_minus


def eqw_residual(p, w, t, z):
    """Residual of z W^2 + [(gamma-z)t + z lam - z - lam] W + (1-z) lam = 0, relative to its terms."""
    p = as_derived(p)
    terms = (z * w * w, ((p.gamma - z) * t + z * p.lam - z - p.lam) * w, (1 - z) * p.lam)
    return abs(math.fsum(terms)) / max(abs(v) for v in terms)


def _log(x, strict, what):
    if x <= 0:
        if strict or x == 0:
            raise AmsError(errors.BRANCH, f"log of nonpositive {what} = {x!r}")
        return math.log(-x)
    return math.log(x)


def eta(p, w, t, z, strict=False):
    p = as_derived(p)
    k = branch_kernel(p, t)
    a = _log(1 - k.R1 * w, strict, "1 - R1 w")
    b = _log(1 + k.R2 * w, strict, "1 + R2 w")
    c = 0.0 if z == 1 else (1 - z) * _log(w, strict, "w")
    return k.V * a + (1 - k.V) * b - c


def eta_ww_at(p, w, t, z):
    """Closed-form second w-derivative, valid at a root of the saddle equation."""
    p = as_derived(p)
    lam, g = p.lam, p.gamma
    A = (lam ** 2 * (z - 1) * (z * lam + z - lam)
         + ((-2 * lam ** 2 + lam - g * lam ** 2 - g) * z ** 2 + lam * (4 * g * lam + 2 * lam - g) * z
            - 3 * g * lam ** 2) * t
         + (z - g) * ((2 * g * lam + lam - 2 * g) * z - 3 * g * lam) * t ** 2
         - g * (z - g) ** 2 * t ** 3)
    B = lam * (1 - z) * ((z * lam + z - lam) * lam + (2 * g * lam + (g - lam - g * lam) * z) * t
                         + g * (z - g) * t ** 2)
    return (A * w + B) / (w * w * ((t * g - lam) * w + lam) ** 2)


def eta_ww(p, branch, t, z, sing_tol=1e-12):
    p = as_derived(p)
    s = saddle_w(p, t, z)
    if s.disc <= sing_tol:
        raise AmsError(errors.SINGULAR, "eta_ww is singular where the saddles coalesce")
    w = s.w_plus if branch == "plus" else s.w_minus
    return eta_ww_at(p, w, t, z)


def mu(p, t, strict=False):
    """Exponent of the eigenvalue product: P(t) ~ sqrt(-theta0/(t-theta0)) exp(N mu(t))."""
    p = as_derived(p)
    if strict and not t > p.theta0:
        raise AmsError(errors.DOMAIN, f"mu needs theta > theta0={p.theta0!r}, got {t!r}")
    lam, g, rho, delta = p.lam, p.gamma, p.rho, p.delta
    gg = g * (1 - g)
    A = gg * t + rho
    if A == 0:
        raise AmsError(errors.DOMAIN, "mu is undefined at theta0")
    d = Delta(p, t)
    num = A * (lam - 1 - t + d)
    den = (lam - 1 - t) * rho + (lam + 1) ** 2 * gg + (1 - lam) * gg * t + d * delta
    return -0.5 * math.log(abs(A)) + (t * (1 - 2 * g) + lam + 1) / (2 * d) * math.log(abs(num / den))


def _guard(p, t, extra=()):
    """Largest finite-difference step that keeps the stencil off singular points."""
    pts = (p.theta0,) + tuple(extra)
    dist = min(abs(t - s) for s in pts)
    return max(0.45 * dist, 1e-9), 0.05 * max(1.0, abs(t))


def _diff(f, t, order, guard):
    step, h0 = guard
    return derivative(f, t, order, h0=min(h0, step), max_step=step)[0]


def mu_d1(p, t):
    p = as_derived(p)
    return _diff(lambda u: mu(p, u), t, 1, _guard(p, t))


def mu_d2(p, t):
    p = as_derived(p)
    return _diff(lambda u: mu(p, u), t, 2, _guard(p, t))


def psi(p, y, w, t, z):
    return y * t + mu(p, t) + eta(p, w, t, z)


def psi_along(p, y, t, z, branch):
    """Psi with w pinned to the chosen saddle W(t, z)."""
    p = as_derived(p)
    return y * t + mu(p, t) + eta(p, saddle_w_branch(p, t, z, branch), t, z)


def psi0(p, y, t):
    """y t + mu + V ln|R1| + (1-V) ln R2: the z -> 0 exponent, in modulus form."""
    p = as_derived(p)
    k = branch_kernel(p, t)
    return y * t + mu(p, t) + k.V * math.log(k.R1) + (1 - k.V) * math.log(k.R2)


def phi_entropy(p, z):
    p = as_derived(p)
    if not 0 < z < 1:
        raise AmsError(errors.DOMAIN, f"Phi needs 0 < z < 1, got {z!r}")
    return -z * math.log(z) - (1 - z) * math.log1p(-z) + z * math.log(p.lam) - math.log1p(p.lam)


def theta_star(p, z):
    """Coalescence point of the two w-saddles, for gamma < z < gamma^2/delta."""
    p = as_derived(p)
    lam, g = p.lam, p.gamma
    if not g < z < g * g / p.delta:
        raise AmsError(errors.DOMAIN, f"theta* needs {g!r} < z < {g * g / p.delta!r}, got {z!r}")
    return (lam * (z - 1) - z + 2 * math.sqrt(z * lam * (1 - z))) / (z - g)


def product_exact(p, t, spectrum=None):
    """prod_j theta_j / (theta_j - t) over the exact spectrum."""
    from .spectral import eigenvalues

    p = as_derived(p)
    th = (spectrum or eigenvalues(p)).thetas
    sign, acc = 1, 0.0
    for tj in th:
        d = tj - t
        if abs(d) <= 1e-12 * max(1.0, abs(tj)):
            raise AmsError(errors.POLE, f"theta={t!r} hits eigenvalue {tj!r}")
        r = tj / d
        if r < 0:
            sign = -sign
        acc += math.log(abs(r))
    return SignedLogReal(sign, acc)


def product_fixed(p, t):
    """sqrt(-theta0/(t-theta0)) exp(N mu(t)), for fixed t > theta0."""
    p = as_derived(p)
    if not t > p.theta0:
        raise AmsError(errors.DOMAIN, "the fixed-theta product form needs theta > theta0")
    return math.sqrt(-p.theta0 / (t - p.theta0)) * math.exp(p.N * mu(p, t))


def log_product_scaled(p, S):
    """ln of the large-theta product form at theta = S N."""
    from scipy.special import gammaln

    p = as_derived(p)
    if not S > 0:
        raise AmsError(errors.DOMAIN, "the scaled product form needs S > 0")
    N = p.N
    g, rho, phi, a = p.gamma, p.rho, p.phi, p.alpha
    return (-0.5 * math.log(2 * math.pi * N) + 0.5 * math.log(rho / (phi * g * (1 - g)))
            + a * math.log(phi / S)
            - N * (1 - g) * math.log((1 - g) * S * N) - N * g * math.log(g)
            + gammaln(phi / S + 1 - a)
            + phi / S * math.log(g / (phi * (1 - g) * N)) + (2 * phi - rho - 1) / S)


def product_scaled(p, S):
    return math.exp(log_product_scaled(p, S))


__all__ = [
    "KernelBundle", "WSaddles", "Delta", "branch_kernel", "disc", "saddle_w", "saddle_w_branch",
    "eqw_residual", "eta", "eta_ww", "eta_ww_at", "mu", "mu_d1", "mu_d2", "psi", "psi_along",
    "psi0", "phi_entropy", "theta_star", "product_exact", "product_fixed", "product_scaled",
    "log_product_scaled",
]
