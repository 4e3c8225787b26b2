import math

import pytest
from hypothesis import given, strategies as st

from amsfluid import errors
from amsfluid.errors import AmsError
from amsfluid.model import (REF_GAMMA, REF_LAMBDA, REF_N, ModelParams, as_derived, check, derive_params,
                            reference_params, validate)


def test_reference_derived_values(ref):
    assert ref.N == REF_N
    assert ref.c == pytest.approx(REF_N * REF_GAMMA)
    assert ref.c_floor == 7
    assert ref.n_eig == 13
    assert ref.alpha == pytest.approx(ref.c - 7)
    assert ref.theta0 == pytest.approx(-ref.rho / (ref.gamma * (1 - ref.gamma)))


@pytest.mark.parametrize("raw, code", [
    (ModelParams(20, 0.01, 7.0), errors.INTEGER_C),
    (ModelParams(20, 0.01, 20.5), errors.OUT_OF_RANGE),
    (ModelParams(20, -1.0, 7.5), errors.OUT_OF_RANGE),
    (ModelParams(0, 0.01, 0.5), errors.OUT_OF_RANGE),
    (ModelParams(20, 1.0, 7.5), errors.UNSTABLE),
    (ModelParams(20.0, 0.01, 7.5), errors.OUT_OF_RANGE),
])
def test_validation_codes(raw, code):
    v = validate(raw)
    assert not v
    assert v.code == code
    with pytest.raises(AmsError) as exc:
        check(raw)
    assert exc.value.code == code


def test_as_derived_accepts_both():
    raw = reference_params()
    d = as_derived(raw)
    assert as_derived(d) is d
    with pytest.raises(AmsError):
        as_derived(ModelParams(20, 0.01, 7.0))


@given(N=st.integers(2, 300), lam=st.floats(1e-3, 5.0), u=st.floats(0.01, 0.99))
def test_derived_identities(N, lam, u):
    lo = lam / (1 + lam)
    g = lo + u * (1 - lo)
    raw = ModelParams.from_gamma(N, lam, g)
    if not validate(raw):
        return
    p = derive_params(raw)
    assert p.rho > 0
    assert p.theta0 < 0
    assert p.phi == pytest.approx(p.gamma + p.lam - p.gamma * p.lam)
    # rho^2 + beta^2 = phi^2 for every admissible parameter set
    assert p.rho ** 2 + p.beta ** 2 == pytest.approx(p.phi ** 2, rel=1e-12)
    assert 0 < p.alpha < 1
    assert math.floor(p.c) == p.c_floor
