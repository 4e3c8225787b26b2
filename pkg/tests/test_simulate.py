import numpy as np
import pytest

from amsfluid import simulate as M
from amsfluid.model import ModelParams, derive_params
from amsfluid.spectral import SpectralSolution

_occ = M._occupation.py_func


@pytest.mark.parametrize("x0, d, tau, a, expected", [
    (0.0, 1.0, 2.0, 0.5, 0.5),     # rising from empty
    (1.0, 1.0, 2.0, 0.5, 0.0),     # starts above the level and rises
    (1.0, -1.0, 2.0, 0.5, 1.5),    # falls through the level
    (0.2, -1.0, 2.0, 0.5, 2.0),    # already below and falling
    (0.0, -1.0, 3.0, 0.0, 3.0),    # pinned at zero
])
def test_occupation(x0, d, tau, a, expected):
    assert _occ(x0, d, tau, a) == pytest.approx(expected)


def test_config_validation():
    with pytest.raises(ValueError):
        M.SimConfig(horizon=10, warmup=20)
    with pytest.raises(ValueError):
        M.SimConfig(replications=1)
    with pytest.raises(ValueError):
        M.SimConfig(x_grid=(2.0, 1.0))
    with pytest.raises(ValueError):
        M.SimConfig(confidence=1.0)
    assert M.SimConfig(horizon=100).warmup == 5.0


def test_seeds_are_stable():
    a = M.replication_seeds(7, 4)
    assert np.array_equal(a, M.replication_seeds(7, 4))
    assert len(set(a.tolist())) == 4


@pytest.fixture(scope="module")
def small():
    # a busier queue so that moderate runs see the buffer
    return derive_params(ModelParams(6, 0.5, 2.5))


def test_determinism(small):
    cfg = M.SimConfig(horizon=2e4, replications=4, seed=3)
    a, b = M.run(small, cfg), M.run(small, cfg)
    assert np.array_equal(a.joint, b.joint)
    c = M.run(small, M.SimConfig(horizon=2e4, replications=4, seed=4))
    assert not np.array_equal(a.joint, c.joint)


def test_estimates_are_consistent(small):
    est = M.run(small, M.SimConfig(horizon=2e5, replications=8, x_grid=(0.5, 1.0, 2.0)))
    assert est.marginal_z.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(est.joint, axis=1) >= 0)
    assert np.all(est.joint <= est.marginal_z[:, None] + 1e-12)
    binom = np.array([SpectralSolution(small).stationary(k) for k in range(7)])
    np.testing.assert_allclose(est.marginal_z, binom, atol=0.01)
    # no buffer while more than c sources are on is impossible: p_positive equals occupancy there
    np.testing.assert_allclose(est.p_positive[3:], est.marginal_z[3:], rtol=1e-9)


def test_coverage_on_busy_queue(small):
    est = M.run(small, M.SimConfig(horizon=2e5, replications=16, x_grid=(0.25, 0.5, 1.0, 2.0, 4.0)))
    rep = M.compare(est, SpectralSolution(small))
    assert rep.cells == 35
    assert rep.coverage >= 0.9
    assert rep.coverage_plain >= 0.9


def test_compare_with_array(small):
    est = M.run(small, M.SimConfig(horizon=2e4, replications=4, x_grid=(1.0,)))
    rep = M.compare(est, est.joint.copy())
    assert rep.coverage == 1.0 and rep.max_scaled_deviation == 0.0
