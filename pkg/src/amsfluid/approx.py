"""Closed-form asymptotic approximations of F_k(x) and f_k(x), region by region.

Each evaluator returns an ``ApproxResult`` whose ``value`` approximates
F_k(x), or F_k(x) - F_k(inf) when ``is_deviation`` is set, and whose
``density`` approximates f_k(x). Both are SignedLogReal because the values
at N=20 already reach 1e-42.
"""

import math
from dataclasses import dataclass

from . import errors
from . import kernel as K
from . import saddle as S
from .errors import AmsError
from .model import as_derived
from .signedlog import ZERO, SignedLogReal, signed_sum
from .special import bessel_j, log_factorial, log_gamma, normal_cdf, normal_logcdf
from .spectral import log_stationary

_LOG_2PI = math.log(2 * math.pi)
_DEVIATION_TAGS = frozenset({"R2", "R3", "III", "VI"})


@dataclass(frozen=True)
class ScaledPoint:
    y: float
    z: float
    chi: float
    l: int
    j: int
    vtrans: float
    s_star: float

    @classmethod
    def from_kx(cls, p, k, x):
        p = as_derived(p)
        N = p.N
        y, z = x / N, k / N
        vt = math.nan
        if z * p.lam + z - p.lam > 0:
            vt = (y - S.Y0(p, z)) * math.sqrt(N / S.Y2(p, z))
        ss = (z - p.gamma) / x if x > 0 else math.inf
        return cls(y, z, x * N, k - p.c_floor, N - k, vt, ss)


@dataclass(frozen=True)
class ApproxResult:
    value: SignedLogReal
    density: SignedLogReal
    region: S.Region
    is_deviation: bool
    flags: tuple = ()

    @property
    def F_approx(self):
        return float(self.value)

    @property
    def f_approx(self):
        return float(self.density)


def _slr(sign, logmag):
    return SignedLogReal.from_log(sign, logmag)


def _sgn(v):
    return 1 if v > 0 else -1


def _log_qN(p):
    return p.N * (math.log(p.lam) - math.log1p(p.lam))


def _result(tag, saddle, F, f, flags=()):
    return ApproxResult(F, f, S.Region(tag, saddle, flags=tuple(flags)), tag in _DEVIATION_TAGS, tuple(flags))


def _sqrt_log(q, what):
    if not q > 0:
        raise AmsError(errors.COMPLEX, f"{what} has nonpositive radicand {q!r}")
    return 0.5 * math.log(q)


# -- interior ------------------------------------------------------------------

def _interior(p, y, z, branch, root):
    T = root.value
    if abs(T) < 1e-8:
        raise AmsError(errors.SINGULAR, "the saddle sits on the pole at 0; use the transition layer")
    if errors.NEAR_COALESCENCE in root.flags:
        raise AmsError(errors.SINGULAR, "saddles coalesce here; eta_ww is singular")
    N = p.N
    w = K.saddle_w_branch(p, T, z, branch)
    eww = K.eta_ww(p, branch, T, z)
    ptt = S.psi_tt(p, y, T, z, branch)
    q = -p.theta0 / ((T - p.theta0) * eww * ptt)
    logG = (-math.log(2 * math.pi * N) + _log_qN(p) - math.log(abs(T * w))
            + _sqrt_log(q, "interior amplitude") + N * K.psi_along(p, y, T, z, branch))
    sign = _sgn(T * w)
    return _slr(sign, logG), _slr(sign * _sgn(T), logG + math.log(abs(T)))


def interior_G1(p, y, z):
    p = as_derived(p)
    root = S.solve_theta(p, y, z)
    F, f = _interior(p, y, z, "minus", root)
    return _result("R1" if root.value > 0 else "R2", root.value, F, f, root.flags)


def interior_G2(p, y, z):
    p = as_derived(p)
    root = S.solve_theta_plus(p, y, z)
    F, f = _interior(p, y, z, "plus", root)
    return _result("R3", root.value, F, f, root.flags)


# -- transition layers -----------------------------------------------------------

def _gauss_layer(tag, log_pref, V, N, y2):
    F = _slr(1, log_pref + normal_logcdf(V))
    f = _slr(1, log_pref - 0.5 * V * V - 0.5 * _LOG_2PI + 0.5 * math.log(N / y2) - math.log(N))
    return _result(tag, None, F, f)


def transition_II(p, y, z):
    p = as_derived(p)
    if not p.gamma < z < 1:
        raise AmsError(errors.OUT_OF_REGION, "the transition layer needs gamma < z < 1")
    N = p.N
    y2 = S.Y2(p, z)
    V = (y - S.Y0(p, z)) * math.sqrt(N / y2)
    log_pref = -0.5 * math.log(2 * math.pi * N * z * (1 - z)) + N * K.phi_entropy(p, z)
    return _gauss_layer("II", log_pref, V, N, y2)


def corner_V(p, j, y):
    p = as_derived(p)
    N = p.N
    y2 = S.Y2(p, 1.0)
    V = (y - S.Y0(p, 1.0)) * math.sqrt(N / y2)
    log_pref = -log_factorial(j) + j * math.log(N / p.lam) + _log_qN(p)
    return _gauss_layer("V", log_pref, V, N, y2)


# -- boundary layers -------------------------------------------------------------

def boundary_III(p, k, y):
    p = as_derived(p)
    N = p.N
    root = S.solve_theta0(p, y)
    T = root.value
    q = (-p.theta0 / (T - p.theta0)) / S.psi0_tt(p, y, T)
    logF = (k * math.log(N) - log_factorial(k) + _log_qN(p) - 0.5 * math.log(2 * math.pi * N)
            - math.log(abs(T)) + k * math.log(p.lam - p.gamma * T)
            + N * K.psi0(p, y, T) + _sqrt_log(q, "Region III amplitude"))
    return _result("III", T, _slr(_sgn(T), logF), _slr(1, logF + math.log(abs(T))))


def _boundary_top(p, j, y, tag):
    N = p.N
    root = S.solve_theta1(p, y)
    T = root.value
    if abs(T) < 1e-8:
        raise AmsError(errors.SINGULAR, "Theta1 = 0 at y = Y0(1); use the corner layer")
    base = (1 + (1 - p.gamma) * T) / p.lam
    logF = (j * math.log(N) - log_factorial(j) - 0.5 * math.log(2 * math.pi * N) + _log_qN(p)
            - math.log(abs(T)) + 0.5 * math.log(-p.theta0 / (T - p.theta0))
            + j * math.log(base) + N * (y * T + K.mu(p, T)) - 0.5 * math.log(K.mu_d2(p, T)))
    return _result(tag, T, _slr(_sgn(T), logF), _slr(1, logF + math.log(abs(T))))


def boundary_IV(p, j, y):
    p = as_derived(p)
    if not 0 < y < S.Y0(p, 1.0):
        raise AmsError(errors.OUT_OF_REGION, "the z=1 boundary layer below the peak needs 0 < y < Y0(1)")
    return _boundary_top(p, j, y, "IV")


def boundary_VI(p, j, y):
    p = as_derived(p)
    if not y > S.Y0(p, 1.0):
        raise AmsError(errors.OUT_OF_REGION, "the z=1 boundary layer above the peak needs y > Y0(1)")
    return _boundary_top(p, j, y, "VI")


def boundary_VII(p, x, z):
    p = as_derived(p)
    g, phi, lam, N, a = p.gamma, p.phi, p.lam, p.N, p.alpha
    if not g < z < 1:
        raise AmsError(errors.SINGULAR, "the x=0 boundary layer needs gamma < z < 1")
    if x == 0:
        return _result("VII", math.inf, ZERO, ZERO)
    dz = z - g
    u = x * phi / dz
    logF = (-1.5 * math.log(2 * math.pi * N) + 0.5 * math.log(p.rho / (phi * g * (1 - z))) - math.log(dz)
            + log_gamma(u + 1 - a) + a * math.log(u)
            + N * (dz * math.log(x * math.e / (dz * dz * N)) + z * math.log(lam) - (1 - z) * math.log1p(-z)
                   - math.log1p(lam) - g * math.log(g))
            + u * math.log(g / (phi * dz * N)) + (2 * lam * (1 - g) / dz + (lam - 1)) * x)
    s_star = dz / x
    return _result("VII", s_star, _slr(1, logF), _slr(1, logF + math.log(s_star * N)))


def corner_VIII(p, j, x):
    p = as_derived(p)
    g, phi, lam, N, a = p.gamma, p.phi, p.lam, p.N, p.alpha
    if x == 0:
        return _result("VIII", math.inf, ZERO, ZERO)
    u = x * phi / (1 - g)
    logF = (2 * j * math.log(N) - log_factorial(j) + _log_qN(p) - math.log(2 * math.pi * N)
            + 0.5 * math.log(p.rho / (phi * g)) - math.log(1 - g)
            + N * ((1 - g) * math.log(math.e * x / ((1 - g) ** 2 * N)) - g * math.log(g))
            + a * math.log(u) + log_gamma(u + 1 - a) + j * math.log((1 - g) ** 2 / (lam * x))
            + u * math.log(g / (phi * (1 - g) * N)) + (3 * lam - 1) * x)
    s_star = (1 - g) / x
    return _result("VIII", s_star, _slr(1, logF), _slr(1, logF + math.log(s_star * N)))


# -- corner at (0, gamma) --------------------------------------------------------

MAX_TERMS = 200
SERIES_TOL = 1e-14


def corner_terms(p, l, chi, power=-1):
    """Signed-log terms of the residue series over the Gamma poles.

    ``power`` is the exponent offset on (j+1-alpha): -1 gives the density
    series, 0 the weights of the buffer mass at k.
    """
    p = as_derived(p)
    a, phi, rho, beta = p.alpha, p.phi, p.rho, p.beta
    lr = math.log(2 * p.lam * (1 - p.gamma) / beta)
    signs, logs = [], []
    best = -math.inf
    for j in range(MAX_TERMS):
        m = j + 1 - a
        J = bessel_j(l - j - 1, (a - 1 - j) * beta / phi)
        lt = (-phi * chi / m + m * (rho - phi) / phi + (j + power) * math.log(m) - log_factorial(j) + m * lr)
        if J != 0.0:
            signs.append(_sgn(J))
            logs.append(lt + math.log(abs(J)))
            best = max(best, logs[-1])
        # past j ~ |l| the Bessel order outruns its argument and the terms fall off steadily
        if j > abs(l) + 2 and len(logs) >= 2 and max(logs[-2:]) < best + math.log(SERIES_TOL):
            return signs, logs
    raise AmsError(errors.SLOW_CONVERGENCE, f"residue series did not converge in {MAX_TERMS} terms")


def corner_I(p, l, chi):
    p = as_derived(p)
    N, g, a = p.N, p.gamma, p.alpha
    log_pref = (0.5 * math.log(N / (2 * math.pi)) + 0.5 * math.log(p.rho * p.phi / (g * (1 - g)))
                + (l - a) * math.log(p.beta / (2 * g)) + N * K.phi_entropy(p, g))
    signs, logs = corner_terms(p, l, chi, -1)
    dens, _ = signed_sum(signs, [v + log_pref for v in logs])
    # F = F(inf) + sum of residues of the integrand divided by S at each pole
    sF, lF = corner_terms(p, l, chi, 0)
    dev, _ = signed_sum(sF, [v + log_pref - math.log(N * p.phi) for v in lF])
    k = p.c_floor + l
    finf = SignedLogReal(1, log_stationary(p, k)) if 0 <= k <= N else ZERO
    F, _ = signed_sum([finf.sign, -dev.sign], [finf.log_magnitude, dev.log_magnitude])
    return _result("I", None, F, dens)


# -- dispatcher --------------------------------------------------------------------

def evaluate(p, tag, k, x):
    """Evaluate a named region's formula at (k, x), ignoring classification."""
    p = as_derived(p)
    N = p.N
    y, z = x / N, k / N
    if tag in ("R1", "R2"):
        return interior_G1(p, y, z)
    if tag == "R3":
        return interior_G2(p, y, z)
    if tag == "I":
        return corner_I(p, k - p.c_floor, x * N)
    if tag == "II":
        return transition_II(p, y, z)
    if tag == "III":
        return boundary_III(p, k, y)
    if tag == "IV":
        return boundary_IV(p, N - k, y)
    if tag == "V":
        return corner_V(p, N - k, y)
    if tag == "VI":
        return boundary_VI(p, N - k, y)
    if tag == "VII":
        return boundary_VII(p, x, z)
    if tag == "VIII":
        return corner_VIII(p, N - k, x)
    raise AmsError(errors.DOMAIN, f"unknown region tag {tag!r}")


def density_approx(p, k, x, widths=None, region=None):
    """Asymptotic F_k(x) and f_k(x) using the region that (x/N, k/N) falls in."""
    p = as_derived(p)
    N = p.N
    if not (0 <= k <= N and x >= 0):
        raise AmsError(errors.OUT_OF_RANGE, f"need 0 <= k <= N and x >= 0, got ({k!r}, {x!r})")
    tag = region or S.classify(p, x / N, k / N, widths=widths).tag
    r = evaluate(p, tag, k, x)
    if region is None and r.region.tag != tag and tag in ("R1", "R2"):
        r = ApproxResult(r.value, r.density, S.Region(tag, r.region.saddle_value, flags=r.flags),
                         tag in _DEVIATION_TAGS, r.flags)
    return r


__all__ = [
    "ScaledPoint", "ApproxResult", "interior_G1", "interior_G2", "transition_II", "corner_V",
    "boundary_III", "boundary_IV", "boundary_VI", "boundary_VII", "corner_VIII", "corner_I",
    "corner_terms", "evaluate", "density_approx", "normal_cdf",
]
