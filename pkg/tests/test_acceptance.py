"""Acceptance criteria 1-10.

Each test records a one-line PASS/FAIL verdict (printed in the terminal
summary by conftest.py) before asserting. Run this file directly to print the
ten lines without pytest.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from amsfluid import approx as A
from amsfluid import kernel as K
from amsfluid import saddle as S
from amsfluid import simulate as M
from amsfluid.model import ModelParams, REF_GAMMA, REF_LAMBDA, derive_params, reference_params
from amsfluid.reproduce import argmax_density, table1, table2
from amsfluid.special import bessel_j
from amsfluid.spectral import SpectralSolution, eigenvalues, generator_oracle

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script
    ACCEPTANCE = {}

from refdata import (REF_ARGMAX_K17, REF_TABLE_HIGH, REF_TABLE_LOW, REF_Y0_AT_1, REF_YSTAR_Z,
                     matches_printed, value)


def _record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _ref():
    return derive_params(reference_params())


def _at(N):
    return derive_params(ModelParams.from_gamma(N, REF_LAMBDA, REF_GAMMA))


def test_criterion_01_exact_table_entries():
    p = _ref()
    t0 = time.perf_counter()
    sol = SpectralSolution(p)
    ours = {k: sol.density(k, 1.0) for k in range(p.N + 1)}
    elapsed = time.perf_counter() - t0
    printed = {k: value(v[1]) for k, v in {**REF_TABLE_LOW, **REF_TABLE_HIGH}.items()}
    rel = {k: abs(ours[k] / printed[k] - 1) for k in printed}
    worst = max(rel, key=rel.get)
    ok = rel[worst] <= 5e-4 and elapsed < 1.0
    _record(1, ok, f"{len(rel)} exact entries, worst rel {rel[worst]:.2e} at k={worst}, {elapsed * 1e3:.0f} ms")
    assert ok


def test_criterion_02_asymptotic_columns():
    p = _ref()
    sol = SpectralSolution(p)
    misses, total = [], 0
    for r in table1(p, solution=sol):
        ref = REF_TABLE_LOW[r["k"]]
        for col, entry in (("theta0_F3", ref[2]), ("thetaplus_G2", ref[3])):
            if entry is None:
                continue
            total += 1
            if not matches_printed(r[col], entry):
                misses.append(f"{col}[{r['k']}]")
    for r in table2(p, solution=sol):
        ref = REF_TABLE_HIGH[r["k"]]
        total += 1
        if not abs(r["theta"] - ref[0]) <= 1e-3:
            misses.append(f"theta[{r['k']}]")
        for col, entry in (("theta_G1", ref[2]), ("theta1_F4", ref[3])):
            if entry is None:
                continue
            total += 1
            if not matches_printed(r[col], entry):
                misses.append(f"{col}[{r['k']}]")
    ok = not misses
    _record(2, ok, f"{total - len(misses)}/{total} entries match to printed digits; misses: {', '.join(misses) or 'none'}")
    assert ok


def test_criterion_03_figure_level_checks():
    p = _ref()
    x17 = argmax_density(p, 17, 1.0, 6.0, formula="G1")
    y01 = S.Y0(p, 1.0)
    zs = S.solve_ystar(p, 1.0 / p.N)
    parts = [abs(x17 - REF_ARGMAX_K17) <= 0.01, abs(y01 - REF_Y0_AT_1) <= 5e-4, abs(zs - REF_YSTAR_Z) <= 5e-4]
    ok = all(parts)
    _record(3, ok, f"argmax k=17 {x17:.4f} (want {REF_ARGMAX_K17}) {'ok' if parts[0] else 'miss'}; "
                   f"Y0(1) {y01:.4f} (want {REF_Y0_AT_1}) {'ok' if parts[1] else 'miss'}; "
                   f"Y*=0.05 at z {zs:.4f} (want {REF_YSTAR_Z}) {'ok' if parts[2] else 'miss'}")
    assert ok


def test_criterion_04_eigenvalue_oracle():
    rng = np.random.default_rng(4)
    worst = 0.0
    cases = 0
    for N in (4, 6, 8, 12):
        for _ in range(10):
            lam = float(rng.uniform(0.05, 2.0))
            lo = lam / (1 + lam)
            while True:
                g = float(rng.uniform(lo + 0.02 * (1 - lo), 1 - 0.02 * (1 - lo)))
                if abs(g * N - round(g * N)) > 1e-3:
                    break
            p = derive_params(ModelParams.from_gamma(N, lam, g))
            D, Mx = generator_oracle(p)
            ev = np.linalg.eigvals(np.linalg.solve(D, Mx))
            neg = np.sort(ev.real[ev.real < -1e-9])
            ours = np.sort(np.array(eigenvalues(p).thetas))
            if len(neg) != len(ours):
                worst = math.inf
                continue
            worst = max(worst, float(np.max(np.abs(neg - ours) / np.abs(ours))))
            cases += 1
    ok = worst <= 1e-8
    _record(4, ok, f"{cases} random (N, lambda, gamma) cases, worst rel eigenvalue error {worst:.2e}")
    assert ok


def test_criterion_05_balance_equations():
    p = _ref()
    # F_k(x) for k > c is a near-total cancellation at small x; the
    # double-double path keeps enough digits for a 1e-8 residual
    sol = SpectralSolution(p, precision="double-double")
    D, Mx = generator_oracle(p)
    worst = 0.0
    for x in (0.05, 0.5, 1.0, 2.0, 5.0, 20.0):
        F = np.array([sol.cdf(k, x) for k in range(p.N + 1)])
        f = np.array([sol.density(k, x) for k in range(p.N + 1)])
        lhs, rhs = D @ f, Mx @ F
        scale = np.abs(D) @ np.abs(f) + np.abs(Mx) @ np.abs(F)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    zero_ok = True
    for k in range(p.c_floor + 1, p.N + 1):
        r = sol.cdf_detail(k, 0.0)
        zero_ok &= abs(r.value) <= max(r.abs_error, 1e-300)
    total = math.fsum(sol.cdf(k, math.inf) for k in range(p.N + 1))
    ok = worst < 1e-8 and zero_ok and abs(total - 1) <= 1e-12
    _record(5, ok, f"double-double: max balance residual {worst:.2e}; F_k(0)=0 above c within budget: {zero_ok}; "
                   f"|sum F(inf) - 1| = {abs(total - 1):.1e}")
    assert ok


def test_criterion_06_product_asymptotics():
    fixed, scaled = [], []
    for N in (50, 100, 200):
        p = _at(N)
        fixed.append(abs(float(K.product_exact(p, 0.5)) / K.product_fixed(p, 0.5) - 1))
        ex = K.product_exact(p, 1.0 * N)
        scaled.append(abs(math.exp(ex.log_magnitude - K.log_product_scaled(p, 1.0)) - 1))
    ok = fixed[0] > fixed[1] > fixed[2] and scaled[0] > scaled[1] > scaled[2]
    _record(6, ok, "fixed theta=0.5: " + " > ".join(f"{v:.2e}" for v in fixed)
            + "; theta=N: " + " > ".join(f"{v:.2e}" for v in scaled))
    assert ok


def test_criterion_07_saddle_and_curve_identities():
    p = _ref()
    # the solvers short-circuit on y == Y0, so test the saddle equations at theta = 0 directly
    r1 = max(abs(S.saddle_fn(p, S.Y0(p, z), z, "minus")(0.0)) for z in (0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95))
    r2 = abs(S.Y0(p, 1.0) + K.mu_d1(p, 0.0))
    r3 = max(abs(K.disc(p, K.theta_star(p, z), z)) for z in np.linspace(0.39, 0.95, 12))
    q = _at(100)
    gaps = []
    for z in (0.45, 0.5, 0.6, 0.7, 0.8):
        ys = S.Ystar(q, z)
        g1 = A.interior_G1(q, ys - 1e-3, z).f_approx
        g2 = A.interior_G2(q, ys + 1e-3, z).f_approx
        gaps.append(abs(g2 / g1 - 1))
    ok = max(r1, r2, r3) <= 1e-8 and max(gaps) <= 1e-3
    _record(7, ok, f"Theta(Y0)={r1:.1e}, Theta1(Y0(1))={r2:.1e}, D(theta*)={r3:.1e}; "
                   f"G1/G2 gap at Y*-/+1e-3 (N=100) up to {max(gaps):.2f}")
    assert ok


@pytest.fixture(scope="module")
def sol200():
    return SpectralSolution(_at(200), precision="auto")


def test_criterion_08_conditional_laws(sol200):
    p = sol200.params
    N = p.N
    # sources given a large buffer
    x = 100.0
    f = np.array([sol200.density(k, x) for k in range(N + 1)])
    w = f / f.sum()
    ks = np.arange(N + 1)
    mean = float(w @ ks)
    var = float(w @ (ks - mean) ** 2)
    kmax = int(np.argmax(w))
    T = S.solve_theta_plus(p, x / N, p.gamma).value
    var_law = N * p.rho / -T
    a_ok = abs(kmax - N * p.gamma) <= 1 and abs(var / var_law - 1) <= 0.1
    # buffer given few sources: exponential rate
    k = 40
    xs = np.linspace(0.1, 2.0, 20)
    slope = np.polyfit(xs, [math.log(sol200.density(k, float(v))) for v in xs], 1)[0]
    rate_law = -S.solve_theta_plus(p, 0.0, k / N).value
    b_ok = abs(-slope / rate_law - 1) <= 0.05
    # buffer given many sources: mode
    k = 120
    res = minimize_scalar(lambda v: -sol200.density(k, v), bounds=(2.0, 20.0), method="bounded",
                          options=dict(xatol=1e-4))
    mode_law = N * S.Y0(p, k / N)
    c_ok = abs(res.x / mode_law - 1) <= 0.05
    ok = a_ok and b_ok and c_ok
    _record(8, ok, f"f(k|x=100): argmax {kmax} vs N*gamma {N * p.gamma:.2f}, var {var:.2f} vs {var_law:.2f}; "
                   f"f(x|k=40) rate {-slope:.3f} vs {rate_law:.3f} ({'ok' if b_ok else 'miss'}); "
                   f"f(x|k=120) mode {res.x:.3f} vs {mode_law:.3f}")
    assert ok


def test_criterion_09_simulation_coverage():
    p = _ref()
    t0 = time.perf_counter()
    est = M.run(p, M.SimConfig(horizon=1e6, replications=32))
    elapsed = time.perf_counter() - t0
    rep = M.compare(est, SpectralSolution(p), min_value=1e-12)
    ok = rep.coverage >= 0.95 and elapsed < 120
    _record(9, ok, f"coverage {rep.coverage:.3f} over {rep.cells} cells (t-interval alone {rep.coverage_plain:.3f}), "
                   f"{elapsed:.1f} s incl. compilation")
    assert ok


def test_criterion_10_residue_series():
    p = _ref()
    sol = SpectralSolution(p)
    k = p.c_floor
    rel = []
    for x in np.linspace(0.01, 0.1, 10):
        ap = A.corner_I(p, k - p.c_floor, float(x) * p.N).f_approx
        rel.append(abs(ap / sol.density(k, float(x)) - 1))
    t = p.beta / (2 * p.gamma)
    ident = 0.0
    for j in range(12):
        arg = (p.alpha - 1 - j) * p.beta / p.phi
        s = math.fsum(t ** (l - j - 1) * bessel_j(l - j - 1, arg) for l in range(-60, 61))
        ident = max(ident, abs(s / math.exp(p.rho / p.phi * (j + 1 - p.alpha)) - 1))
    ok = max(rel) <= 0.10 and ident <= 1e-10
    _record(10, ok, f"corner density within {max(rel):.1%} of exact at k={k}, x in [0.01, 0.1]; "
                    f"generating identity error {ident:.1e} (|l|<=60)")
    assert ok


if __name__ == "__main__":
    import sys

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "sol200" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    fn(SpectralSolution(_at(200), precision="auto"))
                else:
                    fn()
            except AssertionError:
                pass
    sys.exit(0 if all(ok for ok, _ in ACCEPTANCE.values()) else 1)
