import math
import warnings

import numpy as np
import pytest

from arqcd.detect import ErgodicCusum, OgaCusum, StationaryCusum, run_detector
from arqcd.experiment import (
    DetectorConfig,
    McConfig,
    _block_seeds,
    _run_ergodic_block,
    _run_oga_block,
    _run_stationary_block,
    estimate_arl,
    estimate_delay,
    estimate_k,
    oga_estimation_errors,
    select_threshold,
    wadd_vs_arl_curve,
    write_curve_csv,
)
from arqcd.model import stationary_state_cov
from arqcd.simulate import ChangeConfig, generate_trajectory, stationary_init


class TestSelectThreshold:
    def test_values(self):
        assert select_threshold(100.0) == pytest.approx(4.605170, abs=1e-6)
        assert select_threshold(math.e) == pytest.approx(1.0, abs=1e-12)
        assert select_threshold(1e4) == pytest.approx(9.210340, abs=1e-6)

    def test_gamma_at_most_one_rejected(self):
        with pytest.raises(ValueError):
            select_threshold(1.0)


def sequential_stop(detector, f, init, t0, horizon, c, master_seed, index):
    rng = np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))
    cfg = ChangeConfig(change_point=t0, length=horizon, init=init)
    traj = generate_trajectory(f, cfg, seed=0, rng=rng)
    alarm = run_detector(detector, traj.observations, c)
    return alarm.stopping_time if alarm else -1


class TestBatchMatchesSequential:
    """The lockstep runners must agree with the one-replicate-at-a-time path."""

    def test_ergodic(self, case1):
        init = stationary_init(case1)
        seeds = _block_seeds(50, 0, 10)
        batch = _run_ergodic_block(case1, init, seeds, math.inf, 2000, 2.5)
        seq = [sequential_stop(ErgodicCusum(case1, init), case1, init,
                               math.inf, 2000, 2.5, 50, i) for i in range(10)]
        assert batch.tolist() == seq

    def test_stationary(self, case1):
        init = stationary_init(case1)
        seeds = _block_seeds(51, 0, 10)
        batch = _run_stationary_block(case1, init, seeds, 1.0, 2000, 3.0)
        obs_cov = stationary_state_cov(case1) + np.eye(2)
        seq = [sequential_stop(StationaryCusum(obs_cov), case1, init,
                               1, 2000, 3.0, 51, i) for i in range(10)]
        assert batch.tolist() == seq

    def test_oga(self, case1):
        init = stationary_init(case1)
        seeds = _block_seeds(52, 0, 10)
        det = DetectorConfig(kind="oga")
        batch = _run_oga_block(case1, init, seeds, 1.0, 800, 3.0, det)
        seq = [sequential_stop(OgaCusum(dim=2), case1, init,
                               1, 800, 3.0, 52, i) for i in range(10)]
        assert batch.tolist() == seq


class TestEstimateArl:
    def test_degenerate_threshold_gives_immediate_stops(self, scalar_a0):
        cfg = McConfig(replicates=400, max_horizon=200, master_seed=1)
        res = estimate_arl(scalar_a0, "stationary", 1e-9, cfg)
        assert 1.0 <= res.estimate <= 8.0
        assert res.n_censored == 0

    def test_monotone_in_threshold_pathwise(self, case1):
        cfg = McConfig(replicates=100, max_horizon=4000, master_seed=2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            low = estimate_arl(case1, "ergodic", 4.0, cfg)
            high = estimate_arl(case1, "ergodic", 6.0, cfg)
        assert high.estimate > low.estimate

    def test_censoring_counts_and_warning(self, case1):
        cfg = McConfig(replicates=50, max_horizon=30, master_seed=3)
        with pytest.warns(RuntimeWarning, match="censored"):
            res = estimate_arl(case1, "ergodic", 8.0, cfg)
        assert res.n_censored > 0
        assert res.n == 50
        assert res.estimate <= 30.0

    def test_nonpositive_threshold_rejected(self, case1):
        cfg = McConfig(replicates=2, max_horizon=10, master_seed=0)
        with pytest.raises(ValueError):
            estimate_arl(case1, "ergodic", 0.0, cfg)

    def test_workers_do_not_change_results(self, case1):
        base = dict(replicates=600, max_horizon=500, master_seed=4)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r1 = estimate_arl(case1, "ergodic", 3.0, McConfig(workers=1, **base))
            r2 = estimate_arl(case1, "ergodic", 3.0, McConfig(workers=4, **base))
        assert r1 == r2

    def test_block_boundaries_do_not_change_results(self, case1):
        """Estimates are identical whether replicates run alone or in blocks."""
        init = stationary_init(case1)
        seeds = _block_seeds(5, 0, 7)
        together = _run_ergodic_block(case1, init, seeds, math.inf, 1000, 2.0)
        alone = np.concatenate([
            _run_ergodic_block(case1, init, [s], math.inf, 1000, 2.0) for s in seeds
        ])
        np.testing.assert_array_equal(together, alone)


class TestEstimateDelay:
    def test_degenerate_threshold_immediate(self, scalar_a0):
        cfg = McConfig(replicates=200, max_horizon=100, master_seed=5)
        res = estimate_delay(scalar_a0, "ergodic", 1e-9, 1, cfg)
        assert res.estimate <= 4.0

    def test_false_alarms_discarded_and_counted(self, case1):
        cfg = McConfig(replicates=300, max_horizon=300, master_seed=6)
        res = estimate_delay(case1, "ergodic", 2.0, 200, cfg)
        assert res.n_discarded > 0
        assert res.n == 300
        assert res.estimate >= 0.0

    def test_all_false_alarmed_raises(self, case1):
        cfg = McConfig(replicates=30, max_horizon=5000, master_seed=7)
        with pytest.raises(RuntimeError, match="false-alarmed"):
            estimate_delay(case1, "ergodic", 0.05, 4999, cfg)

    def test_scaling_with_threshold(self, scalar_a0):
        """Delay grows linearly in the threshold, slope near 1/drift."""
        cfg = McConfig(replicates=1500, max_horizon=4000, master_seed=8)
        k_const = 0.5 * (1.0 - math.log(2.0))
        d6 = estimate_delay(scalar_a0, "ergodic", 6.0, 1, cfg)
        d9 = estimate_delay(scalar_a0, "ergodic", 9.0, 1, cfg)
        assert abs(d6.estimate / 6.0 - 1.0 / k_const) / (1.0 / k_const) < 0.15
        assert abs(d9.estimate / 9.0 - 1.0 / k_const) / (1.0 / k_const) < 0.15

    def test_detector_delay_ordering(self, case1):
        """Known-parameter detector <= data-driven <= within-slack of baseline."""
        cfg = McConfig(replicates=600, max_horizon=5000, master_seed=16)
        c = select_threshold(300.0)
        erg = estimate_delay(case1, "ergodic", c, 1, cfg)
        sta = estimate_delay(case1, "stationary", c, 1, cfg)
        oga = estimate_delay(case1, DetectorConfig(kind="oga"), c, 1, cfg)
        assert erg.estimate < sta.estimate
        slack = 2.0 * math.hypot(erg.std_error, oga.std_error)
        assert erg.estimate <= oga.estimate + slack


class TestEstimateK:
    def test_scalar_a0_closed_form(self, scalar_a0):
        cfg = McConfig(replicates=8, max_horizon=1, master_seed=9)
        res = estimate_k(scalar_a0, horizon=30_000, cfg=cfg)
        expected = 0.5 * (1.0 - math.log(2.0))
        assert abs(res.estimate - expected) < 3 * res.std_error + 1e-3

    def test_positive_for_case1(self, case1):
        cfg = McConfig(replicates=6, max_horizon=1, master_seed=10)
        res = estimate_k(case1, horizon=20_000, cfg=cfg)
        assert res.estimate - 2.326 * res.std_error > 0

    def test_burn_in_invariance(self, scalar_a0):
        cfg = McConfig(replicates=8, max_horizon=1, master_seed=11)
        r1 = estimate_k(scalar_a0, horizon=30_000, cfg=cfg, burn_in=1000)
        r2 = estimate_k(scalar_a0, horizon=30_000, cfg=cfg, burn_in=10_000)
        tol = 2 * (r1.std_error + r2.std_error) + 1e-3
        assert abs(r1.estimate - r2.estimate) < tol

    def test_bad_burn_in_rejected(self, scalar_a0):
        with pytest.raises(ValueError):
            estimate_k(scalar_a0, horizon=100, burn_in=100)


class TestCurve:
    def test_row_order_and_cardinality(self, scalar_a0, tmp_path):
        cfg = McConfig(replicates=80, max_horizon=3000, master_seed=12)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rows = wadd_vs_arl_curve(scalar_a0, ["ergodic", "stationary"],
                                     [20.0, 50.0], cfg)
        assert len(rows) == 4
        assert [(r.detector, r.gamma) for r in rows] == [
            ("ergodic", 20.0), ("ergodic", 50.0),
            ("stationary", 20.0), ("stationary", 50.0),
        ]
        for r in rows:
            assert r.threshold == pytest.approx(math.log(r.gamma))

        path = tmp_path / "curve.csv"
        write_curve_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ("detector,gamma,threshold,arl_hat,arl_se,"
                            "delay_hat,delay_se,n_censored")
        assert len(lines) == 5
        # doubles carry 17 significant digits
        assert lines[1].split(",")[2] == f"{math.log(20.0):.17g}"

    def test_unsorted_gammas_rejected(self, scalar_a0):
        cfg = McConfig(replicates=2, max_horizon=10, master_seed=0)
        with pytest.raises(ValueError):
            wadd_vs_arl_curve(scalar_a0, ["ergodic"], [100.0, 10.0], cfg)


class TestResultInvariants:
    def test_std_error_zero_iff_constant(self, scalar_a0):
        cfg = McConfig(replicates=100, max_horizon=5, master_seed=13)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = estimate_arl(scalar_a0, "ergodic", 50.0, cfg)
        # every replicate censors at the horizon: all values equal
        assert res.n_censored == 100
        assert res.std_error == 0.0
        assert res.estimate == 5.0

    def test_censoring_accounting_exact(self, case1):
        cfg = McConfig(replicates=64, max_horizon=50, master_seed=14)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = estimate_arl(case1, "ergodic", 6.0, cfg)
        assert 0 <= res.n_censored <= res.n

    def test_unknown_detector_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown detector"):
            DetectorConfig(kind="glrt")


class TestOgaDiagnostics:
    def test_error_snapshots_shape_and_decrease(self, case1):
        cfg = McConfig(replicates=8, max_horizon=3000, master_seed=15)
        errs = oga_estimation_errors(case1, cfg, snapshots=(100, 3000))
        assert errs.shape == (8, 2, 2)
        med = np.median(errs, axis=0)
        assert med[1, 0] < med[0, 0]

    def test_requires_oga(self, case1):
        cfg = McConfig(replicates=2, max_horizon=100, master_seed=0)
        with pytest.raises(ValueError):
            oga_estimation_errors(case1, cfg, snapshots=(10,),
                                  detector=DetectorConfig(kind="ergodic"))
