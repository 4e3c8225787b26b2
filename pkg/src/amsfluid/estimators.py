"""scikit-learn style wrappers around the exact, asymptotic and simulated solutions.

The model is fully specified by its parameters, so ``fit`` ignores data and
just builds the solver. ``predict`` takes an (n, 2) array of (k, x) rows and
returns densities; ``predict_cdf`` returns F_k(x).
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import approx
from .errors import AmsError
from .model import ModelParams, check, derive_params
from .simulate import SimConfig, run
from .spectral import SpectralSolution


def _points(X, N):
    X = check_array(X, ensure_2d=True, dtype=float, ensure_all_finite=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected (k, x) columns, got shape {X.shape}")
    k = X[:, 0]
    if np.any(k != np.round(k)) or np.any(k < 0) or np.any(k > N):
        raise ValueError(f"k must be integers in 0..{N}")
    if np.any(X[:, 1] < 0):
        raise ValueError("x must be nonnegative")
    return k.astype(int), X[:, 1]


class _Base(BaseEstimator):
    def _params(self):
        if self.c is not None and self.gamma is not None:
            raise ValueError("give c or gamma, not both")
        if self.gamma is not None:
            raw = ModelParams.from_gamma(self.N, self.lam, self.gamma)
        else:
            raw = ModelParams(self.N, self.lam, self.c)
        return derive_params(check(raw))

    def fit(self, X=None, y=None):
        self.params_ = self._params()
        self._build()
        return self


class ExactSolver(_Base):
    def __init__(self, N=20, lam=0.0122448, c=None, gamma=0.37987897, precision="double"):
        self.N = N
        self.lam = lam
        self.c = c
        self.gamma = gamma
        self.precision = precision

    def _build(self):
        self.solution_ = SpectralSolution(self.params_, precision=self.precision)

    def predict(self, X):
        check_is_fitted(self, "solution_")
        k, x = _points(X, self.params_.N)
        return np.array([self.solution_.density(a, b) for a, b in zip(k, x)])

    def predict_cdf(self, X):
        check_is_fitted(self, "solution_")
        k, x = _points(X, self.params_.N)
        return np.array([self.solution_.cdf(a, b) for a, b in zip(k, x)])


class AsymptoticApproximator(_Base):
    """Region-dispatched asymptotics. ``region`` forces one formula everywhere."""

    def __init__(self, N=20, lam=0.0122448, c=None, gamma=0.37987897, region=None, on_error="nan"):
        self.N = N
        self.lam = lam
        self.c = c
        self.gamma = gamma
        self.region = region
        self.on_error = on_error

    def _build(self):
        self.regions_ = None

    def _eval(self, X):
        check_is_fitted(self, "params_")
        k, x = _points(X, self.params_.N)
        out, tags = [], []
        for a, b in zip(k, x):
            try:
                r = approx.density_approx(self.params_, int(a), float(b), region=self.region)
                out.append(r)
                tags.append(r.region.tag)
            except AmsError:
                if self.on_error != "nan":
                    raise
                out.append(None)
                tags.append("")
        self.regions_ = np.array(tags)
        return out

    def predict(self, X):
        return np.array([r.f_approx if r else np.nan for r in self._eval(X)])

    def predict_cdf(self, X):
        """F_k(x), or the deviation F_k(x) - F_k(inf) where the region only gives that."""
        return np.array([r.F_approx if r else np.nan for r in self._eval(X)])


class FluidQueueSimulator(_Base):
    def __init__(self, N=20, lam=0.0122448, c=None, gamma=0.37987897, horizon=1e6, replications=32,
                 seed=12345, x_grid=(0.25, 0.5, 1.0, 2.0, 4.0), confidence=0.99):
        self.N = N
        self.lam = lam
        self.c = c
        self.gamma = gamma
        self.horizon = horizon
        self.replications = replications
        self.seed = seed
        self.x_grid = x_grid
        self.confidence = confidence

    def _build(self):
        cfg = SimConfig(horizon=self.horizon, replications=self.replications, seed=self.seed,
                        x_grid=tuple(self.x_grid), confidence=self.confidence)
        self.estimate_ = run(self.params_, cfg)

    def predict_cdf(self, X):
        """Simulated P[Z=k, X<=x]; x must lie on the configured grid."""
        check_is_fitted(self, "estimate_")
        k, x = _points(X, self.params_.N)
        grid = list(self.estimate_.x_grid)
        out = []
        for a, b in zip(k, x):
            if b not in grid:
                raise ValueError(f"x={b!r} is not on the simulation grid {grid}")
            out.append(self.estimate_.joint[a, grid.index(b)])
        return np.array(out)

    predict = predict_cdf
