"""Exact steady state through the spectral representation.

    F_k(x) = F_k(inf) + sum_j a_j exp(theta_j x) h_k(theta_j)
    f_k(x) =            sum_j a_j theta_j exp(theta_j x) h_k(theta_j)

Eigenvalues come from the closed form theta_j = -sigma(j/N). At an eigenvalue
N*V(theta_j) = j is an integer, so h_k(theta_j) is a finite sum of ordinary
binomials. Coefficients and polynomial values are stored as signed logs; the
final alternating sum over j is compensated (see ``signedlog``).

``precision="double-double"`` redoes the whole pipeline with mpmath at 34
significant digits, for large N where the alternating sum loses too much.
Polynomial rows are then built per k on first use. ``precision="auto"``
evaluates in double and falls back to the mpmath path only for results
flagged CANCELLATION; if 34 digits still leave less than the budget, the
working precision is doubled (up to MAX_DPS) until they do.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import errors
from .errors import AmsError
from .model import as_derived
from .signedlog import (NEG_INF, SignedLogReal, signed_sum, split, split_exp, split_int, split_mul,
                        split_pow, split_sum, split_to_float, split_to_slr)

DOUBLE_DIGITS = 15.95
EPS = 2.0 ** -52
DD_DIGITS = 32.0
DD_DPS = 34
MAX_DPS = 256
DEFAULT_BUDGET = 6.0


def sigma(p, x):
    """sigma(x) on [0, 1-gamma); theta_j = -sigma(j/N)."""
    p = as_derived(p)
    g, lam, rho = p.gamma, p.lam, p.rho
    if x == g or x == 1 - g:
        raise AmsError(errors.DOMAIN, f"sigma has a pole at x={x!r}")
    if not (0 <= x < 1 - g):
        raise AmsError(errors.DOMAIN, f"sigma needs 0 <= x < 1-gamma, got {x!r}")
    num = rho + 2 * (lam - 1) * (1 - x) * x + (1 - 2 * x) * math.sqrt(rho * rho + 4 * lam * (1 - x) * x)
    return num / (2 * (g - x) * (1 - g - x))


def _sigma_mp(p, x):
    g, lam = mpmath.mpf(p.c) / p.N, mpmath.mpf(p.lam)
    rho = g - lam + lam * g
    num = rho + 2 * (lam - 1) * (1 - x) * x + (1 - 2 * x) * mpmath.sqrt(rho * rho + 4 * lam * (1 - x) * x)
    return num / (2 * (g - x) * (1 - g - x))


@dataclass(frozen=True)
class Spectrum:
    thetas: tuple

    def __len__(self):
        return len(self.thetas)


def eigenvalues(p):
    p = as_derived(p)
    return Spectrum(tuple(-sigma(p, j / p.N) for j in range(p.n_eig)))


def stationary(p, k):
    """Binomial(N, lam/(1+lam)) mass at k, via log-gamma."""
    p = as_derived(p)
    if not 0 <= k <= p.N:
        raise AmsError(errors.OUT_OF_RANGE, f"k={k} outside 0..{p.N}")
    return math.exp(log_stationary(p, k))


def log_stationary(p, k):
    N, lam = p.N, p.lam
    return (math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1)
            + k * math.log(lam) - N * math.log1p(lam))


def _branch(lam, g, t, lib=math):
    d = lib.sqrt((t + 1 - lam) ** 2 + 4 * lam)
    v = (1 + ((2 * g - 1) * t - lam - 1) / d) / 2
    r1 = (d + (lam - 1 - t)) / (2 * lam)
    r2 = (d - (lam - 1 - t)) / (2 * lam)
    return v, r1, r2


def _log_gen_binom(a, m):
    """sign and ln|C(a, m)| for real a and integer m >= 0."""
    if m < 0:
        return 0, NEG_INF
    sign, acc = 1, 0.0
    for i in range(m):
        f = a - i
        if f == 0:
            return 0, NEG_INF
        if f < 0:
            sign = -sign
        acc += math.log(abs(f))
    return sign, acc - math.lgamma(m + 1)


def h_poly(p, k, theta, generalized=False, eig_tol=1e-8):
    """h_k(theta) as a SignedLogReal.

    Only eigenvalues are accepted unless ``generalized`` is set, in which case
    the binomials with real upper argument are formed as falling products.
    """
    p = as_derived(p)
    N = p.N
    if not 0 <= k <= N:
        raise AmsError(errors.OUT_OF_RANGE, f"k={k} outside 0..{N}")
    v, r1, r2 = _branch(p.lam, p.gamma, float(theta))
    nv = N * v
    j = round(nv)
    at_eig = abs(nv - j) <= eig_tol * max(1.0, N)
    if not at_eig and not generalized:
        raise AmsError(errors.DOMAIN, f"theta={theta!r} is not an eigenvalue (N*V={nv!r})")
    m = N - k
    lr1, lr2 = math.log(r1), math.log(r2)
    signs, logs = [], []
    for i in range(m + 1):
        if at_eig:
            if i > j or m - i > N - j:
                continue
            s1, l1 = 1, _lcomb(j, i)
            s2, l2 = 1, _lcomb(N - j, m - i)
        else:
            s1, l1 = _log_gen_binom(nv, i)
            s2, l2 = _log_gen_binom(N - nv, m - i)
        s = s1 * s2 * (-1) ** i
        if s == 0:
            continue
        signs.append(s)
        logs.append(l1 + l2 + i * lr1 + (m - i) * lr2)
    return signed_sum(signs, logs)[0]


def _lcomb(n, r):
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def coefficients(p, spectrum=None):
    """a_j = -(lam/(lam+1))^N prod_{i != j} theta_i / (theta_i - theta_j)."""
    p = as_derived(p)
    th = (spectrum or eigenvalues(p)).thetas
    _check_distinct(th)
    base = p.N * (math.log(p.lam) - math.log1p(p.lam))
    out = []
    for j, tj in enumerate(th):
        sign, acc = -1, base
        for i, ti in enumerate(th):
            if i == j:
                continue
            ratio = ti / (ti - tj)
            if ratio < 0:
                sign = -sign
            acc += math.log(abs(ratio))
        out.append(SignedLogReal(sign, acc))
    return out


def _check_distinct(th):
    s = sorted(th)
    for a, b in zip(s, s[1:]):
        if abs(b - a) <= 1e-12 * max(abs(a), abs(b)):
            raise AmsError(errors.DEGENERATE_SPECTRUM, f"eigenvalues {a!r} and {b!r} coincide")


def generator_oracle(p):
    """Dense (D, M) with D F'(x) = M F(x); only meant for cross-checks."""
    p = as_derived(p)
    N, lam, c = p.N, p.lam, p.c
    D = np.diag([j - c for j in range(N + 1)])
    M = np.zeros((N + 1, N + 1))
    for j in range(N + 1):
        M[j, j] = -(lam * (N - j) + j)
        if j + 1 <= N:
            M[j, j + 1] = j + 1
        if j - 1 >= 0:
            M[j, j - 1] = lam * (N - j + 1)
    return D, M


@dataclass(frozen=True)
class EvalResult:
    value: float
    digits_lost: float
    abs_error: float
    flags: tuple = field(default_factory=tuple)


class SpectralSolution:
    """Immutable exact solution for one parameter set."""

    def __init__(self, params, precision="double", budget=DEFAULT_BUDGET):
        if precision not in ("double", "double-double", "auto"):
            raise ValueError(f"unknown precision {precision!r}")
        self.params = as_derived(params)
        self.precision = precision
        self.budget = float(budget)
        self._mp = None
        self._mp_wide = {}
        if precision == "double-double":
            self._build_mp()
        else:
            self._build_double()

    # -- construction -------------------------------------------------
    def _build_double(self):
        p = self.params
        N, M = p.N, p.n_eig
        self.spectrum = eigenvalues(p)
        th = self.spectrum.thetas
        _check_distinct(th)
        # a_j as split floats: exact rescaling keeps every ulp of the product
        base = split_pow(split(p.lam / (1 + p.lam)), N)
        am, ae = [], []
        for j, tj in enumerate(th):
            acc = (-base[0], base[1])
            for i, ti in enumerate(th):
                if i != j:
                    acc = split_mul(acc, split(ti / (ti - tj)))
            am.append(acc[0])
            ae.append(acc[1])
        binom = [[split_int(math.comb(n, r)) for r in range(n + 1)] for n in range(N + 1)]
        hm = np.zeros((N + 1, M))
        he = np.zeros((N + 1, M), dtype=np.int64)
        hlost = np.zeros((N + 1, M))
        for j in range(M):
            _, r1, r2 = _branch(p.lam, p.gamma, th[j])
            p1 = [split_pow(split(-r1), i) for i in range(N + 1)]
            p2 = [split_pow(split(r2), i) for i in range(N + 1)]
            for k in range(N + 1):
                m = N - k
                ms, es = [], []
                for i in range(max(0, m - (N - j)), min(m, j) + 1):
                    t = split_mul(split_mul(binom[j][i], binom[N - j][m - i]), split_mul(p1[i], p2[m - i]))
                    ms.append(t[0])
                    es.append(t[1])
                hm[k, j], he[k, j], hlost[k, j] = split_sum(ms, es)
        self._th = np.array(th)
        # relative error of a_j: every ratio theta_i/(theta_i - theta_j) inherits
        # the rounding of both eigenvalues, amplified when they are close
        tha = np.abs(self._th)
        gap = np.abs(self._th[:, None] - self._th[None, :])
        np.fill_diagonal(gap, np.inf)
        self._cond = ((tha[:, None] + tha[None, :]) / gap).sum(axis=0)
        self._am, self._ae = np.array(am), np.array(ae, dtype=np.int64)
        self._hm, self._he, self._hlost = hm, he, hlost
        self.coeffs = [split_to_slr(m, e) for m, e in zip(am, ae)]
        self._finf = [split_exp(log_stationary(p, k)) for k in range(N + 1)]
        self._digits = DOUBLE_DIGITS

    def _build_mp(self, dps=DD_DPS):
        """Eigenvalues and coefficients at ``dps`` digits; h rows are filled on demand."""
        p = self.params
        N, M = p.N, p.n_eig
        with mpmath.workdps(dps):
            lam = mpmath.mpf(p.lam)
            g = mpmath.mpf(p.c) / N
            th = [-_sigma_mp(p, mpmath.mpf(j) / N) for j in range(M)]
            coeffs = []
            base = (lam / (lam + 1)) ** N
            for j in range(M):
                prod = mpmath.mpf(1)
                for i in range(M):
                    if i != j:
                        prod *= th[i] / (th[i] - th[j])
                coeffs.append(-base * prod)
            roots = [_branch(lam, g, t, mpmath)[1:] for t in th]
            finf = [mpmath.binomial(N, k) * lam ** k / (1 + lam) ** N for k in range(N + 1)]
        state = dict(th=th, coeffs=coeffs, roots=roots, finf=finf, rows={}, dps=dps)
        if dps != DD_DPS:
            return state
        self._mp = state
        if self.precision == "double-double":
            self.spectrum = Spectrum(tuple(float(t) for t in th))
            self.coeffs = [SignedLogReal.from_log(int(mpmath.sign(a)), float(mpmath.log(abs(a)))) for a in coeffs]
            self._th = np.array(self.spectrum.thetas)
            self._digits = DD_DIGITS

    def _state(self, dps):
        if dps == DD_DPS:
            if self._mp is None:
                self._build_mp()
            return self._mp
        if dps not in self._mp_wide:
            self._mp_wide[dps] = self._build_mp(dps)
        return self._mp_wide[dps]

    def _mp_row(self, k, dps=DD_DPS):
        st = self._state(dps)
        rows = st["rows"]
        if k not in rows:
            N = self.params.N
            m = N - k
            hs, lost = [], []
            with mpmath.workdps(dps):
                for j, (r1, r2) in enumerate(st["roots"]):
                    terms = [mpmath.binomial(j, i) * mpmath.binomial(N - j, m - i) * (-r1) ** i * r2 ** (m - i)
                             for i in range(0, min(m, j) + 1) if m - i <= N - j]
                    v = mpmath.fsum(terms)
                    hs.append(v)
                    lost.append(_lost_mp(v, max((abs(t) for t in terms), default=mpmath.mpf(0))))
            rows[k] = (hs, max(lost, default=0.0))
        return rows[k]

    # -- accessors ----------------------------------------------------
    def h(self, k, j):
        """h_k(theta_j) as SignedLogReal."""
        if self.precision != "double-double":
            return split_to_slr(self._hm[k, j], int(self._he[k, j]))
        v = self._mp_row(k)[0][j]
        if v == 0:
            return SignedLogReal.from_log(0, NEG_INF)
        return SignedLogReal(int(mpmath.sign(v)), float(mpmath.log(abs(v))))

    def stationary(self, k):
        if self.precision == "double-double":
            return float(self._mp["finf"][k])
        return split_to_float(*self._finf[k])

    # -- evaluation -------------------------------------------------
    def _check(self, k, x):
        N = self.params.N
        if not (0 <= k <= N) or int(k) != k:
            raise AmsError(errors.OUT_OF_RANGE, f"k={k!r} outside 0..{N}")
        if not x >= 0:
            raise AmsError(errors.OUT_OF_RANGE, f"x={x!r} must be nonnegative")

    def _eval(self, k, x, density):
        k = int(k)
        self._check(k, x)
        if math.isinf(x):
            return EvalResult(0.0 if density else self.stationary(k), 0.0, 0.0)
        if self.precision == "double-double":
            return self._eval_mp(k, x, density)
        r = self._eval_double(k, float(x), density)
        if self.precision == "auto" and errors.CANCELLATION in r.flags:
            return self._eval_mp(k, x, density)
        return r

    def _eval_double(self, k, x, density):
        ms, es = [], []
        for j, tj in enumerate(self._th):
            t = split_mul((self._am[j], int(self._ae[j])), (self._hm[k, j], int(self._he[k, j])))
            t = split_mul(t, split_exp(tj * x))
            if density:
                t = split_mul(t, split(tj))
            ms.append(t[0])
            es.append(t[1])
        if not density:
            ms.append(self._finf[k][0])
            es.append(self._finf[k][1])
        m, e, lost = split_sum(ms, es)
        mags = np.abs([split_to_float(a, b) for a, b in zip(ms, es)])
        hl = float(np.max(self._hlost[k])) if self._hlost.shape[1] else 0.0
        M = len(self._th)
        rel = np.ones(len(ms))
        rel[:M] = 10.0 ** self._hlost[k] * (self.params.N + 4) + 8 * self._cond
        err = EPS * float(np.sum(mags * rel))
        return self._result(split_to_float(m, e), lost, err, hl)

    def _eval_mp(self, k, x, density, dps=DD_DPS):
        hrow, hl = self._mp_row(k, dps)
        d = self._state(dps)
        digits = dps - 2
        with mpmath.workdps(dps):
            xx = mpmath.mpf(x)
            terms = []
            for j, tj in enumerate(d["th"]):
                t = d["coeffs"][j] * mpmath.exp(tj * xx) * hrow[j]
                terms.append(t * tj if density else t)
            if not density:
                terms.append(d["finf"][k])
            s = mpmath.fsum(terms)
            big = max(abs(t) for t in terms)
            lost = _lost_mp(s, big)
            err = float(big) * 10.0 ** (hl - digits) * len(terms)
        r = self._result(float(s), lost, err, hl, digits)
        if self.precision == "auto" and errors.CANCELLATION in r.flags and 2 * dps <= MAX_DPS:
            return self._eval_mp(k, x, density, 2 * dps)
        return r

    def _result(self, value, lost, err, hlost, digits=None):
        total_lost = max(lost, 0.0) + hlost
        flags = ()
        if (digits or self._digits) - total_lost < self.budget:
            flags = (errors.CANCELLATION,)
        return EvalResult(value, total_lost, err, flags)

    def cdf_detail(self, k, x):
        return self._eval(k, x, False)

    def density_detail(self, k, x):
        if not x > 0:
            raise AmsError(errors.OUT_OF_RANGE, "the density is defined for x > 0")
        return self._eval(k, x, True)

    def cdf(self, k, x):
        return self.cdf_detail(k, x).value

    def density(self, k, x):
        return self.density_detail(k, x).value

    def cdf_grid(self, ks, xs):
        return np.array([[self.cdf(k, x) for x in xs] for k in ks])

    def density_grid(self, ks, xs):
        return np.array([[self.density(k, x) for x in xs] for k in ks])


def _lost_mp(s, big):
    if big == 0:
        return 0.0
    if s == 0:
        return math.inf
    return max(0.0, float(mpmath.log10(big / abs(s))))


def cdf_exact(p, k, x, **kw):
    return SpectralSolution(p, **kw).cdf(k, x)


def density_exact(p, k, x, **kw):
    return SpectralSolution(p, **kw).density(k, x)
