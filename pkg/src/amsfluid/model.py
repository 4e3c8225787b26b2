"""Model parameters of the on-off fluid queue and the constants derived from them."""

import math
import numbers
from dataclasses import dataclass, field

from .errors import AmsError, INTEGER_C, OUT_OF_RANGE, UNSTABLE

INTEGER_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """N sources, off->on rate ``lam``, drain rate ``c`` (in units of one source)."""

    N: int
    lam: float
    c: float

    @classmethod
    def from_gamma(cls, N, lam, gamma):
        return cls(int(N), float(lam), float(gamma) * int(N))


@dataclass(frozen=True)
class DerivedParams:
    N: int
    lam: float
    c: float
    gamma: float
    rho: float
    phi: float
    delta: float
    alpha: float
    beta: float
    theta0: float
    epsilon: float
    c_floor: int

    @property
    def n_eig(self):
        return self.N - self.c_floor


@dataclass(frozen=True)
class Validation:
    ok: bool
    code: str = ""
    message: str = ""
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def validate(raw):
    """Check every invariant; never raises."""
    try:
        N, lam, c = raw.N, float(raw.lam), float(raw.c)
    except (AttributeError, TypeError, ValueError) as exc:
        return Validation(False, OUT_OF_RANGE, f"unreadable parameters: {exc}")
    if not isinstance(N, numbers.Integral) or isinstance(N, bool) or N < 1:
        return Validation(False, OUT_OF_RANGE, f"N must be a positive integer, got {N!r}")
    if not (math.isfinite(lam) and lam > 0):
        return Validation(False, OUT_OF_RANGE, f"lambda must be positive, got {lam!r}")
    if not (math.isfinite(c) and 0 < c < N):
        return Validation(False, OUT_OF_RANGE, f"c must lie in (0, N), got {c!r}")
    nearest = round(c)
    if abs(c - nearest) <= INTEGER_TOL * max(1.0, abs(c)):
        return Validation(False, INTEGER_C, f"c={c!r} is (numerically) an integer")
    gamma = c / N
    if not (lam / (lam + 1) < gamma < 1):
        return Validation(False, UNSTABLE,
                          f"need lambda/(lambda+1) < c/N < 1, got {lam / (lam + 1)!r} vs {gamma!r}")
    return Validation(True)


def check(raw):
    v = validate(raw)
    if not v.ok:
        raise AmsError(v.code, v.message)
    return raw


def derive_params(raw):
    """Pure function of ``raw``; does not validate."""
    N, lam, c = int(raw.N), float(raw.lam), float(raw.c)
    g = c / N
    rho = g - lam + lam * g
    c_floor = math.floor(c)
    return DerivedParams(
        N=N, lam=lam, c=c, gamma=g, rho=rho,
        phi=g + lam - g * lam,
        delta=(1 - g) ** 2 * lam + g * g,
        alpha=c - c_floor,
        beta=2.0 * math.sqrt(lam * g * (1 - g)),
        theta0=-rho / (g * (1 - g)),
        epsilon=1.0 / N,
        c_floor=c_floor,
    )


def as_derived(p):
    """Accept ModelParams or DerivedParams."""
    if isinstance(p, DerivedParams):
        return p
    return derive_params(check(p))


# the N=20 configuration used by the reference tables
REF_N = 20
REF_LAMBDA = 0.0122448
REF_GAMMA = 0.37987897


def reference_params():
    return ModelParams.from_gamma(REF_N, REF_LAMBDA, REF_GAMMA)
