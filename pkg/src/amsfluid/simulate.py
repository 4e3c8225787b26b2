"""Monte Carlo simulation of the on-off fluid queue.

Sample paths are simulated event by event. Between jumps of Z the buffer moves
linearly with slope Z - c (and sticks at 0 when the slope is negative), so the
time spent below each grid level is added in closed form; there is no time
step and no discretisation bias.

Replication r draws from numba's Mersenne Twister seeded with the first word
of ``numpy.random.SeedSequence(seed).spawn(replications)[r]``, so results do
not depend on thread scheduling.
"""

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import stats

from .model import as_derived
from .spectral import SpectralSolution

MIN_SOJOURNS = 30

# prefer OpenMP; older TBB builds only produce a warning before being skipped
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@dataclass(frozen=True)
class SimConfig:
    horizon: float = 1e6
    warmup: float = None
    replications: int = 32
    seed: int = 12345
    x_grid: tuple = (0.25, 0.5, 1.0, 2.0, 4.0)
    confidence: float = 0.99

    def __post_init__(self):
        if self.warmup is None:
            object.__setattr__(self, "warmup", 0.05 * self.horizon)
        if not self.horizon > self.warmup >= 0:
            raise ValueError("need horizon > warmup >= 0")
        if self.replications < 2:
            raise ValueError("need at least two replications for a confidence interval")
        if list(self.x_grid) != sorted(self.x_grid):
            raise ValueError("x_grid must be sorted ascending")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class SimEstimate:
    """Time-average estimates over replications.

    ``joint[k, g]`` estimates P[Z=k, X<=x_g]. ``half_widths`` are the
    replication t-intervals; ``lower``/``upper`` widen them with an exact
    Poisson bound for states visited fewer than MIN_SOJOURNS times.
    """

    x_grid: np.ndarray
    joint: np.ndarray
    marginal_z: np.ndarray
    p_positive: np.ndarray
    half_widths: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sojourns: np.ndarray
    config: SimConfig = field(repr=False, default=None)


@numba.njit(cache=True)
def _occupation(x0, d, tau, a):
    """Time in [0, tau] with X <= a, for X(t) = max(x0 + d t, 0)."""
    if d > 0:
        if x0 > a:
            return 0.0
        return min(tau, (a - x0) / d)
    if x0 <= a:
        return tau
    return max(0.0, tau - (x0 - a) / (-d))


@numba.njit(cache=True)
def _replicate(N, lam, c, horizon, warmup, grid, seed):
    np.random.seed(seed)
    G = grid.shape[0]
    below = np.zeros((N + 1, G))
    occ = np.zeros(N + 1)
    pos = np.zeros(N + 1)
    visits = np.zeros(N + 1, dtype=np.int64)
    # start from the binomial mode with an empty buffer; warmup removes the bias
    k = int(N * lam / (1 + lam))
    x = 0.0
    t = 0.0
    while t < horizon:
        up = lam * (N - k)
        rate = up + k
        tau = np.random.exponential(1.0 / rate)
        t1 = t + tau
        # clip the interval to the observation window
        s0 = max(t, warmup)
        s1 = min(t1, horizon)
        d = k - c
        if s1 > s0:
            # buffer level at the start of the observed part
            xs = x + d * (s0 - t)
            if xs < 0.0:
                xs = 0.0
            w = s1 - s0
            occ[k] += w
            visits[k] += 1
            for g in range(G):
                below[k, g] += _occupation(xs, d, w, grid[g])
            if d > 0:
                pos[k] += w
            else:
                pos[k] += min(w, xs / (-d))
        x = x + d * tau
        if x < 0.0:
            x = 0.0
        t = t1
        if np.random.random() * rate < up:
            k += 1
        else:
            k -= 1
    span = horizon - warmup
    return below / span, occ / span, pos / span, visits


@numba.njit(parallel=True, cache=True)
def _run_all(N, lam, c, horizon, warmup, grid, seeds):
    R = seeds.shape[0]
    G = grid.shape[0]
    below = np.zeros((R, N + 1, G))
    occ = np.zeros((R, N + 1))
    pos = np.zeros((R, N + 1))
    visits = np.zeros((R, N + 1), dtype=np.int64)
    for r in numba.prange(R):
        b, o, p, v = _replicate(N, lam, c, horizon, warmup, grid, seeds[r])
        below[r] = b
        occ[r] = o
        pos[r] = p
        visits[r] = v
    return below, occ, pos, visits


def replication_seeds(seed, replications):
    children = np.random.SeedSequence(int(seed)).spawn(int(replications))
    return np.array([int(ch.generate_state(1, dtype=np.uint32)[0]) for ch in children], dtype=np.int64)


def run(params, config=None):
    p = as_derived(params)
    cfg = config or SimConfig()
    grid = np.asarray(cfg.x_grid, dtype=float)
    seeds = replication_seeds(cfg.seed, cfg.replications)
    below, occ, pos, visits = _run_all(p.N, p.lam, p.c, float(cfg.horizon), float(cfg.warmup), grid, seeds)
    R = cfg.replications
    joint = below.mean(axis=0)
    sd = below.std(axis=0, ddof=1)
    tq = stats.t.ppf(0.5 + cfg.confidence / 2, R - 1)
    hw = tq * sd / math.sqrt(R)
    lower, upper = joint - hw, joint + hw
    # thinly visited states: the t-interval is meaningless, bound the mass by the
    # exact Poisson interval on the number of sojourns
    n = visits.sum(axis=0)
    exit_rate = p.lam * (p.N - np.arange(p.N + 1)) + np.arange(p.N + 1)
    total_time = R * (cfg.horizon - cfg.warmup)
    a = 1 - cfg.confidence
    for k in range(p.N + 1):
        if n[k] < MIN_SOJOURNS:
            hi = stats.chi2.ppf(1 - a / 2, 2 * (n[k] + 1)) / 2 / (exit_rate[k] * total_time)
            lower[k] = 0.0
            upper[k] = np.maximum(upper[k], hi)
    return SimEstimate(grid, joint, occ.mean(axis=0), pos.mean(axis=0), hw,
                       np.maximum(lower, 0.0), np.minimum(upper, 1.0), n, cfg)


@dataclass(frozen=True)
class CompareReport:
    coverage: float
    coverage_plain: float
    cells: int
    max_scaled_deviation: float
    z_scores: np.ndarray
    exact: np.ndarray


def compare(estimate, exact, min_value=1e-12):
    """Coverage of exact F_k(x) by the estimate's intervals.

    ``exact`` is a SpectralSolution or an array shaped like ``estimate.joint``.
    Cells whose exact value is below ``min_value`` are skipped. Zero-width
    intervals count as covering an equal value.
    """
    if isinstance(exact, SpectralSolution):
        ex = exact.cdf_grid(range(exact.params.N + 1), estimate.x_grid)
    else:
        ex = np.asarray(exact, dtype=float)
    mask = np.abs(ex) >= min_value
    est, hw = estimate.joint, estimate.half_widths
    inside = (ex >= estimate.lower) & (ex <= estimate.upper)
    inside_plain = np.abs(ex - est) <= hw
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(hw > 0, (est - ex) / np.where(hw > 0, hw, 1.0), np.where(est == ex, 0.0, np.inf))
    cells = int(mask.sum())
    cov = float(inside[mask].mean()) if cells else 1.0
    cov_plain = float(inside_plain[mask].mean()) if cells else 1.0
    return CompareReport(cov, cov_plain, cells, float(np.max(np.abs(z[mask]))) if cells else 0.0, z, ex)


__all__ = ["SimConfig", "SimEstimate", "CompareReport", "run", "compare", "replication_seeds"]
