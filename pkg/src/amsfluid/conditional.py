"""Conditional limit laws: sources given buffer level, buffer level given sources."""

import math
from dataclasses import dataclass

from . import errors
from . import kernel as K
from . import saddle as S
from .approx import corner_terms
from .errors import AmsError
from .model import as_derived
from .signedlog import signed_sum
from .spectral import SpectralSolution, stationary

GAUSSIAN = "GAUSSIAN"
EXPONENTIAL = "EXPONENTIAL"
DISCRETE_BESSEL_MIXTURE = "DISCRETE_BESSEL_MIXTURE"
EXP_MIXTURE = "EXP_MIXTURE"

L_WINDOW = 60


@dataclass(frozen=True)
class ConditionalLaw:
    """A limit law in one variable.

    ``variable`` names what the law is over: "k" for source counts, "x" for
    the buffer level and "chi" for the corner-scaled buffer level x*N.
    ``scale`` is the standard deviation for GAUSSIAN and the mean for
    EXPONENTIAL. Mixture terms are (weight, rate) pairs for EXP_MIXTURE and
    (probability, l) pairs for DISCRETE_BESSEL_MIXTURE, where k = floor(c) + l.
    """

    kind: str
    location: float
    scale: float
    variable: str
    mixture_terms: tuple = None
    truncation: float = 0.0

    @property
    def variance(self):
        if self.kind == GAUSSIAN:
            return self.scale ** 2
        if self.kind == EXPONENTIAL:
            return self.scale ** 2
        raise AttributeError("variance is only tabulated for the Gaussian and exponential laws")

    def pdf(self, v):
        if self.kind == GAUSSIAN:
            u = (v - self.location) / self.scale
            return math.exp(-0.5 * u * u) / (self.scale * math.sqrt(2 * math.pi))
        if self.kind == EXPONENTIAL:
            d = v - self.location
            return math.exp(-d / self.scale) / self.scale if d >= 0 else 0.0
        if self.kind == EXP_MIXTURE:
            if v < 0:
                return 0.0
            return math.fsum(w * r * math.exp(-r * v) for w, r in self.mixture_terms)
        if self.kind == DISCRETE_BESSEL_MIXTURE:
            return dict((l, w) for w, l in self.mixture_terms).get(round(v - math.floor(self.location + 1e-12)), 0.0)
        raise AmsError(errors.DOMAIN, f"unknown law kind {self.kind!r}")


# -- masses ---------------------------------------------------------------------

def mass_M1(p, x, method="exact", solution=None):
    """Buffer density at level x summed over k."""
    p = as_derived(p)
    if not x > 0:
        raise AmsError(errors.DOMAIN, "M1 needs x > 0")
    if method == "exact":
        sol = solution or SpectralSolution(p)
        return math.fsum(sol.density(k, x) for k in range(p.N + 1))
    if method == "laplace":
        N, y = p.N, x / p.N
        T = S.solve_theta_plus(p, y, p.gamma).value
        ptt = S.psi_tt(p, y, T, p.gamma, "plus")
        # T < theta0 and ptt < 0 here: the two square roots only make sense together
        q = -p.theta0 / ((T - p.theta0) * ptt)
        if not q > 0:
            raise AmsError(errors.COMPLEX, f"Laplace amplitude argument {q!r} is not positive")
        return math.exp(-0.5 * math.log(2 * math.pi * N) + N * (math.log(p.lam) - math.log1p(p.lam))
                        + 0.5 * math.log(q) + N * K.psi_along(p, y, T, p.gamma, "plus"))
    raise AmsError(errors.DOMAIN, f"unknown method {method!r}")


def mass_M2(p, k, solution=None):
    """P[Z=k, X>0] = F_k(inf) - F_k(0)."""
    p = as_derived(p)
    if not 0 <= k <= p.N:
        raise AmsError(errors.OUT_OF_RANGE, f"k={k!r} outside 0..{p.N}")
    finf = stationary(p, k)
    if k > p.c:
        # the buffer is never empty while more than c sources are on
        return finf
    sol = solution or SpectralSolution(p)
    return finf - sol.cdf(k, 0.0)


# -- sources given the buffer ----------------------------------------------------

def _log_sum(signs, logs):
    v, _ = signed_sum(signs, logs)
    return v


def bessel_mixture(p, chi, window=L_WINDOW):
    """Discrete law of l = k - floor(c) given x = chi/N, from the ratio of residue series."""
    p = as_derived(p)
    a, phi, rho, g = p.alpha, p.phi, p.rho, p.gamma
    lb = math.log(p.beta / (2 * g))
    lr = math.log(p.lam * (1 - g) / g)
    ds, dl = [], []
    for j in range(400):
        m = j + 1 - a
        t = -phi * chi / m + (2 * rho - phi) * m / phi + (j - 1) * math.log(m) - math.lgamma(j + 1) + m * lr
        ds.append(1)
        dl.append(t)
        if j > 5 and t < max(dl) + math.log(1e-17):
            break
    den = _log_sum(ds, dl)
    probs = []
    for l in range(-window, window + 1):
        s, lg = corner_terms(p, l, chi, -1)
        num = _log_sum(s, [v + (l - a) * lb for v in lg])
        probs.append((float(num / den) if num.sign else 0.0, l))
    total = math.fsum(w for w, _ in probs)
    return tuple(probs), total


def sources_given_buffer(p, x, small_buffer=None):
    """Limit law of the number of on sources given buffer level x.

    Large buffers (x of order N) give a Gaussian around N*gamma; small buffers
    (x of order 1/N) give the Bessel-weighted discrete law in l. The switch is
    at x = 1 unless ``small_buffer`` forces one branch.
    """
    p = as_derived(p)
    if not x > 0:
        raise AmsError(errors.DOMAIN, "sources_given_buffer needs x > 0")
    small = x < 1.0 if small_buffer is None else small_buffer
    if small:
        terms, total = bessel_mixture(p, x * p.N)
        return ConditionalLaw(DISCRETE_BESSEL_MIXTURE, p.c - p.alpha, math.nan, "k",
                              tuple((w / total, l) for w, l in terms), truncation=1.0 - total)
    T = S.solve_theta_plus(p, x / p.N, p.gamma).value
    return ConditionalLaw(GAUSSIAN, p.N * p.gamma, math.sqrt(p.N * p.rho / -T), "k")


# -- buffer given the sources ----------------------------------------------------

def exp_mixture(p, l):
    """Mixture of exponentials in chi = x N at k = floor(c) + l."""
    p = as_derived(p)
    s, lg = corner_terms(p, l, 0.0, 0)
    total = _log_sum(s, lg)
    phi, a = p.phi, p.alpha
    terms = []
    for j, (sj, v) in enumerate(zip(s, lg)):
        terms.append((sj * math.exp(v - total.log_magnitude) * total.sign, phi / (j + 1 - a)))
    return tuple(terms)


def buffer_given_sources(p, k, corner_width=1.0):
    """Limit law of the buffer level given k on sources, conditioned on X > 0."""
    p = as_derived(p)
    N = p.N
    if not 0 <= k <= N:
        raise AmsError(errors.OUT_OF_RANGE, f"k={k!r} outside 0..{N}")
    z = k / N
    if abs(k - p.c) <= corner_width:
        return ConditionalLaw(EXP_MIXTURE, 0.0, math.nan, "chi", exp_mixture(p, k - p.c_floor))
    if z > p.gamma:
        return ConditionalLaw(GAUSSIAN, N * S.Y0(p, z), math.sqrt(N * S.Y2(p, z)), "x")
    T = S.solve_theta0(p, 0.0).value if k == 0 else S.solve_theta_plus(p, 0.0, z).value
    return ConditionalLaw(EXPONENTIAL, 0.0, 1.0 / -T, "x")


__all__ = [
    "ConditionalLaw", "GAUSSIAN", "EXPONENTIAL", "DISCRETE_BESSEL_MIXTURE", "EXP_MIXTURE",
    "mass_M1", "mass_M2", "sources_given_buffer", "buffer_given_sources", "bessel_mixture",
    "exp_mixture",
]
