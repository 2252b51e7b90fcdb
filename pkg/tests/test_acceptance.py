"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines
as they complete. The Monte-Carlo criteria take a few minutes in total.
"""

import math
import time
import warnings

import numpy as np
import pytest

from arqcd.detect import (
    ErgodicCusum,
    _oga_core,
    grad_h_hat,
    max_form_statistic,
    proj_pd,
)
from arqcd.experiment import (
    DetectorConfig,
    McConfig,
    estimate_arl,
    estimate_delay,
    estimate_k,
    oga_estimation_errors,
    select_threshold,
)
from arqcd.filtering import forward_init, forward_step, joint_log_density_oracle
from arqcd.model import (
    ARModel,
    FirstOrderModel,
    lift_to_first_order,
    steady_state_filter_cov,
)
from arqcd.simulate import stationary_init

from conftest import random_init, random_stable_model

K_SCALAR = 0.5 * (1.0 - math.log(2.0))  # drift constant of the a=0, r=1 model


def report(criterion: str, ok: bool, detail: str):
    print(f"[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{criterion}: {detail}"


@pytest.fixture(scope="module")
def case1():
    return FirstOrderModel(a=np.array([[0.7, 0.4], [0.2, 0.6]]),
                           r=np.array([[1.0, 0.5], [0.5, 1.0]]))


@pytest.fixture(scope="module")
def scalar_a0():
    return FirstOrderModel(a=np.array([[0.0]]), r=np.array([[1.0]]))


@pytest.fixture(scope="module")
def case3():
    return ARModel(coeffs=(np.array([[0.4, 0.3], [0.2, 0.1]]),
                           np.array([[0.3, 0.2], [0.1, 0.2]])),
                   innovation_cov=np.eye(2))


def test_criterion_1_filter_oracle_equivalence():
    """Recursive log-likelihood vs direct joint density, 100 random models."""
    started = time.monotonic()
    rng = np.random.default_rng(1001)
    worst = 0.0
    for case in range(100):
        k = int(rng.integers(1, 4))
        f = random_stable_model(rng, k)
        init = random_init(rng, k)
        ys = rng.normal(size=(20, k))
        res = forward_init(init, ys[0])
        for y in ys[1:]:
            res = forward_step(res.state, y, f)
        oracle = joint_log_density_oracle(f, init, ys)
        rel = abs(res.state.log_like - oracle) / max(1.0, abs(res.state.log_like))
        worst = max(worst, rel)
    elapsed = time.monotonic() - started
    report("criterion 1 (filter = oracle)",
           worst <= 1e-8 and elapsed < 10.0,
           f"worst rel err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_sigma_star_fixed_point(case1):
    f = FirstOrderModel(a=[[0.5]], r=[[1.0]])
    sigma = steady_state_filter_cov(f)[0, 0]
    closed_form = (-7.0 + math.sqrt(65.0)) / 2.0
    scalar_ok = abs(sigma - closed_form) <= 1e-10

    target = steady_state_filter_cov(case1, tol=1e-14)
    s = np.zeros((2, 2))
    eye = np.eye(2)
    dists = []
    for _ in range(80):
        m = case1.a @ s @ case1.a.T + case1.r
        s = np.linalg.solve(m + eye, m)
        s = 0.5 * (s + s.T)
        dists.append(np.linalg.norm(s - target, ord="fro"))
    dists = np.array(dists)
    valid = dists[:-1] > 1e-12
    ratios = dists[1:][valid] / dists[:-1][valid]
    contraction_ok = ratios.max() < 1.0
    report("criterion 2 (Sigma* fixed point)",
           scalar_ok and contraction_ok,
           f"|sigma-closed form| {abs(sigma - closed_form):.1e}, "
           f"max contraction ratio {ratios.max():.3f}")


def test_criterion_3_cusum_identity(case1):
    """Recursive statistic equals the max form on 50 random 30-step runs."""
    rng = np.random.default_rng(1003)
    init = stationary_init(case1)
    worst = 0.0
    for _ in range(50):
        det = ErgodicCusum(case1, init)
        incs = []
        for _ in range(30):
            det.update(rng.normal(size=2) * rng.uniform(0.5, 2.0))
            incs.append(det.last_increment)
        worst = max(worst, abs(det.statistic - max_form_statistic(incs)))
    report("criterion 3 (CuSum recursion = max form)",
           worst <= 1e-10, f"worst abs diff {worst:.2e}")


def test_criterion_4_arl_guarantee(case1, scalar_a0):
    """Censored-lower-bound ARL >= 100 at c = log(100), one-sided 95% test."""
    c = select_threshold(100.0)
    lines = []
    ok = True
    for model_name, f in (("case1", case1), ("scalar", scalar_a0)):
        for det in (DetectorConfig(kind="ergodic"), DetectorConfig(kind="oga")):
            cfg = McConfig(replicates=2000, max_horizon=10_000,
                           master_seed=1004)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                res = estimate_arl(f, det, c, cfg)
            lower = res.estimate - 1.645 * res.std_error
            ok = ok and lower >= 100.0
            lines.append(f"{model_name}/{det.kind} {res.estimate:.0f}"
                         f" (lb {lower:.0f}, cens {res.n_censored})")
    report("criterion 4 (ARL >= gamma)", ok, "; ".join(lines))


def test_criterion_5_drift_constant(case1, scalar_a0, case3):
    res = estimate_k(scalar_a0, horizon=100_000,
                     cfg=McConfig(replicates=20, max_horizon=1, master_seed=1005))
    scalar_ok = abs(res.estimate - K_SCALAR) <= 3.0 * res.std_error
    details = [f"scalar {res.estimate:.6f} vs {K_SCALAR:.6f} (se {res.std_error:.1e})"]

    positive_ok = True
    for name, f in (("scalar", scalar_a0), ("case1", case1),
                    ("case3-lifted", lift_to_first_order(case3))):
        r = estimate_k(f, horizon=20_000,
                       cfg=McConfig(replicates=8, max_horizon=1, master_seed=1055))
        positive = r.estimate - 2.326 * r.std_error > 0.0
        positive_ok = positive_ok and positive
        details.append(f"{name} K {r.estimate:.4f}>0")
    report("criterion 5 (drift constant)", scalar_ok and positive_ok,
           "; ".join(details))


def test_criterion_6_delay_scaling(case1, scalar_a0):
    c = 9.0
    cfg = McConfig(replicates=2000, max_horizon=10_000, master_seed=1006)
    res = estimate_delay(scalar_a0, "ergodic", c, 1, cfg)
    ratio = res.estimate / c
    target = 1.0 / K_SCALAR
    scalar_ok = abs(ratio - target) / target <= 0.15

    gammas = [1e2, 1e3, 1e4]
    arls, delays = [], []
    for gamma in gammas:
        thr = select_threshold(gamma)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            arl = estimate_arl(case1, "ergodic", thr,
                               McConfig(replicates=200, max_horizon=1_000_000,
                                        master_seed=1066))
        delay = estimate_delay(case1, "ergodic", thr, 1, cfg)
        arls.append(arl.estimate)
        delays.append(delay.estimate)
    x = np.log(arls)
    y = np.array(delays)
    r_squared = float(np.corrcoef(x, y)[0, 1] ** 2)
    report("criterion 6 (delay scaling)",
           scalar_ok and r_squared > 0.95,
           f"delay(9)/9 = {ratio:.3f} vs {target:.3f}; "
           f"case1 R^2 = {r_squared:.4f} over ARLs "
           + "/".join(f"{a:.0f}" for a in arls))


def test_criterion_7_ergodic_beats_stationary(case1):
    c = select_threshold(1e3)
    cfg = McConfig(replicates=2000, max_horizon=10_000, master_seed=1007)
    erg = estimate_delay(case1, "ergodic", c, 1, cfg)
    sta = estimate_delay(case1, "stationary", c, 1, cfg)
    pooled = math.hypot(erg.std_error, sta.std_error)
    gap = sta.estimate - erg.estimate
    report("criterion 7 (delay ordering)",
           gap > 2.0 * pooled,
           f"ergodic {erg.estimate:.2f} < stationary {sta.estimate:.2f}, "
           f"gap {gap:.2f} > 2*SE {2 * pooled:.2f}")


def test_criterion_8_oga_estimates_converge(case1):
    cfg = McConfig(replicates=20, max_horizon=5000, master_seed=1008)
    errs = oga_estimation_errors(case1, cfg, snapshots=(100, 5000))
    med = np.median(errs, axis=0)  # (snapshot, matrix) with 0 = A, 1 = R
    ok = med[1, 0] < med[0, 0] and med[1, 1] < med[0, 1]
    report("criterion 8 (OGA estimate convergence)", ok,
           f"median A err {med[0, 0]:.3f}->{med[1, 0]:.3f}, "
           f"R err {med[0, 1]:.3f}->{med[1, 1]:.3f}")


def test_criterion_9_gradient_contract():
    rng = np.random.default_rng(1009)
    step = 1e-6
    worst = 0.0
    for _ in range(50):
        a = rng.normal(scale=0.5, size=(2, 2))
        w1 = rng.normal(size=(2, 2))
        r = w1 @ w1.T + 0.5 * np.eye(2)
        mu = rng.normal(size=2)
        w2 = rng.normal(size=(2, 2))
        sigma = 0.3 * (w2 @ w2.T) + 0.3 * np.eye(2)
        y = rng.normal(size=2)
        grad_a, grad_r, _ = grad_h_hat(a, r, mu, sigma, y)
        fd_a = np.zeros((2, 2))
        fd_r = np.zeros((2, 2))
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2))
                e[i, j] = step
                fd_a[i, j] = (_oga_core(a + e, r, mu, sigma, y)[2]
                              - _oga_core(a - e, r, mu, sigma, y)[2]) / (2 * step)
                fd_r[i, j] = (_oga_core(a, r + e, mu, sigma, y)[2]
                              - _oga_core(a, r - e, mu, sigma, y)[2]) / (2 * step)
        rel_a = np.abs(grad_a - fd_a).max() / max(1.0, np.abs(fd_a).max())
        rel_r = np.abs(grad_r - fd_r).max() / max(1.0, np.abs(fd_r).max())
        worst = max(worst, rel_a, rel_r)
    report("criterion 9 (gradient vs finite differences)",
           worst <= 1e-4, f"worst rel err {worst:.2e}")


def test_criterion_10_lifting_and_projection(case3):
    """Blocked AR(2) path equals the lifted AR(1) path on shared noise draws.

    The two recursions associate floating-point additions differently, so the
    deterministic agreement is asserted at machine precision (1e-12) rather
    than bit-for-bit.
    """
    a1, a2 = case3.coeffs
    f = lift_to_first_order(case3)
    rng = np.random.default_rng(1010)
    t_blocks = 1000
    omega = rng.standard_normal((2 * t_blocks, 2))
    x = np.zeros((2 * t_blocks, 2))
    x[0] = omega[0]
    x[1] = a1 @ x[0] + omega[1]
    for s in range(2, 2 * t_blocks):
        x[s] = a1 @ x[s - 1] + a2 @ x[s - 2] + omega[s]
    blocked = x.reshape(t_blocks, 4)
    lifted = np.empty_like(blocked)
    lifted[0] = blocked[0]
    for t in range(1, t_blocks):
        w = np.concatenate([omega[2 * t], a1 @ omega[2 * t] + omega[2 * t + 1]])
        lifted[t] = f.a @ lifted[t - 1] + w
    max_diff = float(np.abs(blocked - lifted).max())
    lift_ok = max_diff <= 1e-12

    proj_ok = True
    eps = 1e-3
    for _ in range(100):
        m = rng.normal(size=(3, 3)) * rng.uniform(0.5, 4.0)
        out = proj_pd(m, eps)
        sym_ok = np.allclose(out, out.T, atol=1e-12)
        eig_ok = np.linalg.eigvalsh(out).min() >= eps - 1e-12
        idem_ok = np.allclose(proj_pd(out, eps), out, atol=1e-11)
        proj_ok = proj_ok and sym_ok and eig_ok and idem_ok
    report("criterion 10 (lifting exactness + projection invariants)",
           lift_ok and proj_ok,
           f"max lift diff {max_diff:.2e}, projection invariants on 100 matrices")
