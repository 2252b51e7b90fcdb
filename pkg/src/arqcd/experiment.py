"""Monte-Carlo evaluation harness: ARL, detection delay, drift constant, curves.

Replicates are independent: replicate i draws from a stream keyed by
(master_seed, i), so estimates do not depend on execution order or on the
worker count. Replicates are processed in fixed-size blocks that advance in
lockstep through time with vectorized detector updates; worker parallelism
distributes whole blocks, never splits them, which keeps outputs bitwise
identical for any --workers value.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from ._linalg import frobenius, spd_cholesky, sym
from .filtering import LOG_2PI
from .model import FirstOrderModel, InitialStateDist, stationary_state_cov
from .simulate import stationary_init

REPLICATE_BLOCK = 256
TIME_BLOCK = 512
_SIGMA_CONV_TOL = 1e-13

DETECTOR_KINDS = ("ergodic", "stationary", "oga")


@dataclass(frozen=True, eq=False)
class DetectorConfig:
    """Which detector to evaluate, with its hyperparameters.

    kind is one of "ergodic", "stationary", "oga". The OGA fields mirror the
    detector defaults; initial estimates default to 0.1 I and I.
    """

    kind: str
    step_size: float = 1e-3
    eig_floor: float = 1e-4
    reset_filter: bool = True
    a0: np.ndarray | None = None
    r0: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise ValueError(f"unknown detector kind {self.kind!r}, expected {DETECTOR_KINDS}")


def _as_detector(detector) -> DetectorConfig:
    if isinstance(detector, DetectorConfig):
        return detector
    return DetectorConfig(kind=str(detector))


@dataclass(frozen=True, eq=False)
class McConfig:
    """Monte-Carlo campaign parameters.

    init is the change-point state distribution used both to simulate
    post-change data and to anchor the detectors; None means the stationary
    distribution of the model.
    """

    replicates: int
    max_horizon: int
    master_seed: int
    workers: int = 1
    init: InitialStateDist | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.max_horizon < 1:
            raise ValueError("max_horizon must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class ExperimentResult:
    """A Monte-Carlo estimate with its standard error and censoring counts."""

    estimate: float
    std_error: float
    n_censored: int
    n: int
    n_discarded: int = 0


@dataclass(frozen=True)
class CurveRow:
    """One (detector, gamma) point of a delay-versus-ARL trade-off curve."""

    detector: str
    gamma: float
    threshold: float
    arl_hat: float
    arl_se: float
    delay_hat: float
    delay_se: float
    n_censored: int


def select_threshold(gamma: float) -> float:
    """Threshold giving a guaranteed ARL of at least gamma: log(gamma)."""
    if gamma <= 1.0:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    return math.log(gamma)


# ---------------------------------------------------------------------------
# observation streams (lockstep, replicating the generate_trajectory order)
# ---------------------------------------------------------------------------


class _ObsStream:
    """Per-replicate observation streams advanced in lockstep.

    Draws happen in fixed time blocks; each replicate's stream consumes
    exactly the same values, in the same order, as generate_trajectory run
    with that replicate's seed. Rows can be dropped between blocks once their
    replicate has stopped.
    """

    def __init__(self, f: FirstOrderModel, init: InitialStateDist, t0: float,
                 horizon: int, seeds: list[np.random.SeedSequence]):
        self.k = f.dim
        self.a = f.a
        self.l_innov = spd_cholesky(f.r, "innovation covariance")
        self.init = init
        self.l_init = spd_cholesky(init.cov, "init covariance")
        self.t0 = t0
        self.horizon = horizon
        self.rngs = [np.random.default_rng(s) for s in seeds]
        self.n = len(seeds)
        self.x = np.zeros((self.n, self.k))
        self.t = 0
        self._buf: np.ndarray | None = None
        self._buf_pos = 0

    def drop_rows(self, keep: np.ndarray) -> None:
        """Forget stopped replicates; only valid at a block boundary."""
        if self._buf is not None and self._buf_pos < self._buf.shape[1]:
            raise RuntimeError("drop_rows called mid-block")
        self.rngs = [r for r, k in zip(self.rngs, keep) if k]
        self.x = self.x[keep]
        self.n = int(keep.sum())

    def _refill(self) -> None:
        t_next = self.t + 1
        n_pre = self.horizon if math.isinf(self.t0) else int(self.t0) - 1
        if t_next <= n_pre:
            width, end = self.k, min(n_pre, self.horizon)
        else:
            width, end = 2 * self.k, self.horizon
        m = min(TIME_BLOCK, end - self.t)
        buf = np.empty((self.n, m, width))
        for i, rng in enumerate(self.rngs):
            buf[i] = rng.standard_normal((m, width))
        self._buf = buf
        self._buf_pos = 0

    def at_block_boundary(self) -> bool:
        return self._buf is None or self._buf_pos >= self._buf.shape[1]

    def step(self) -> np.ndarray:
        """Observations for the next time step, one row per live replicate."""
        if self.t >= self.horizon:
            raise RuntimeError("stream exhausted")
        if self.at_block_boundary():
            self._refill()
        z = self._buf[:, self._buf_pos]
        self._buf_pos += 1
        self.t += 1
        if math.isinf(self.t0) or self.t < self.t0:
            return z
        if self.t == self.t0:
            self.x = self.init.mean + z[:, : self.k] @ self.l_init.T
        else:
            self.x = self.x @ self.a.T + z[:, : self.k] @ self.l_innov.T
        return self.x + z[:, self.k :]


# ---------------------------------------------------------------------------
# vectorized detector runners
# ---------------------------------------------------------------------------


class _ErgodicSchedule:
    """Per-step filter matrices; deterministic, so shared across replicates.

    The filter covariance recursion does not depend on the data, so the
    Cholesky factors and update maps for step t are precomputed once and
    reused by every replicate; past convergence the steady-state entry is
    reused for all later steps.
    """

    def __init__(self, f: FirstOrderModel, init: InitialStateDist, max_steps: int):
        eye = np.eye(f.dim)
        self.entries = []
        m = sym(init.cov)
        sigma_prev = None
        for _ in range(max_steps):
            l_mi = spd_cholesky(m + eye, "predicted covariance + I")
            logdet_mi = 2.0 * float(np.sum(np.log(np.diag(l_mi))))
            sigma = sym(np.linalg.solve(m + eye, m))
            gmap = np.linalg.solve(m + eye, f.a)
            self.entries.append((l_mi, logdet_mi, sigma, gmap))
            if sigma_prev is not None and frobenius(sigma - sigma_prev) < _SIGMA_CONV_TOL:
                break
            sigma_prev = sigma
            m = sym(f.a @ sigma @ f.a.T + f.r)
        self.init_mean_term = np.linalg.solve(sym(init.cov) + eye, init.mean)

    def entry(self, t: int):
        return self.entries[min(t, len(self.entries)) - 1]


def _run_ergodic_block(f, init, seeds, t0, horizon, c):
    """Stopping times for one block of Ergodic CuSum replicates (-1: censored)."""
    sched = _ErgodicSchedule(f, init, horizon)
    stream = _ObsStream(f, init, t0, horizon, seeds)
    n = len(seeds)
    taus = np.full(n, -1, dtype=np.int64)
    gidx = np.arange(n)
    mu = np.zeros((n, f.dim))
    s = np.zeros(n)
    stopped = np.zeros(n, dtype=bool)
    while stream.n > 0 and stream.t < horizon:
        t = stream.t + 1
        y = stream.step()
        l_mi, logdet_mi, sigma, gmap = sched.entry(t)
        if t == 1:
            mean_pred = np.broadcast_to(init.mean, y.shape)
            mu = sched.init_mean_term + y @ sigma.T
        else:
            mean_pred = mu @ f.a.T
            mu = mu @ gmap.T + y @ sigma.T
        z = solve_triangular(l_mi, (y - mean_pred).T, lower=True, check_finite=False)
        inc = -0.5 * logdet_mi - 0.5 * np.sum(z * z, axis=0) + 0.5 * np.sum(y * y, axis=1)
        s = np.maximum(0.0, s + inc)
        newly = (~stopped) & (s >= c)
        if newly.any():
            taus[gidx[newly]] = t
            stopped |= newly
        if stream.at_block_boundary() and stopped.any():
            keep = ~stopped
            if not keep.any():
                break
            stream.drop_rows(keep)
            gidx, mu, s = gidx[keep], mu[keep], s[keep]
            stopped = stopped[keep]
    return taus


def _run_k_block(f, init, seeds, horizon, burn_in):
    """Per-replicate average post-change increment after burn-in."""
    sched = _ErgodicSchedule(f, init, horizon)
    stream = _ObsStream(f, init, 1, horizon, seeds)
    n = len(seeds)
    mu = np.zeros((n, f.dim))
    total = np.zeros(n)
    while stream.t < horizon:
        t = stream.t + 1
        y = stream.step()
        l_mi, logdet_mi, sigma, gmap = sched.entry(t)
        if t == 1:
            mean_pred = np.broadcast_to(init.mean, y.shape)
            mu = sched.init_mean_term + y @ sigma.T
        else:
            mean_pred = mu @ f.a.T
            mu = mu @ gmap.T + y @ sigma.T
        if t > burn_in:
            z = solve_triangular(l_mi, (y - mean_pred).T, lower=True, check_finite=False)
            total += (-0.5 * logdet_mi - 0.5 * np.sum(z * z, axis=0)
                      + 0.5 * np.sum(y * y, axis=1))
    return total / float(horizon - burn_in)


def _run_stationary_block(f, init, seeds, t0, horizon, c):
    """Stopping times for one block of stationary-CuSum replicates."""
    obs_cov = sym(stationary_state_cov(f) + np.eye(f.dim))
    l_c = spd_cholesky(obs_cov, "stationary observation covariance")
    logdet_c = 2.0 * float(np.sum(np.log(np.diag(l_c))))
    stream = _ObsStream(f, init, t0, horizon, seeds)
    n = len(seeds)
    taus = np.full(n, -1, dtype=np.int64)
    gidx = np.arange(n)
    s = np.zeros(n)
    stopped = np.zeros(n, dtype=bool)
    while stream.n > 0 and stream.t < horizon:
        t = stream.t + 1
        y = stream.step()
        z = solve_triangular(l_c, y.T, lower=True, check_finite=False)
        inc = -0.5 * logdet_c - 0.5 * np.sum(z * z, axis=0) + 0.5 * np.sum(y * y, axis=1)
        s = np.maximum(0.0, s + inc)
        newly = (~stopped) & (s >= c)
        if newly.any():
            taus[gidx[newly]] = t
            stopped |= newly
        if stream.at_block_boundary() and stopped.any():
            keep = ~stopped
            if not keep.any():
                break
            stream.drop_rows(keep)
            gidx, s, stopped = gidx[keep], s[keep], stopped[keep]
    return taus


def _proj_pd_batch(x: np.ndarray, eps: float) -> np.ndarray:
    w, v = np.linalg.eigh(sym(x))
    return sym((v * np.maximum(w, eps)[..., None, :]) @ np.swapaxes(v, -1, -2))


class _OgaBatch:
    """Lockstep OGA-CuSum state for a block of replicates."""

    def __init__(self, n: int, k: int, det: DetectorConfig):
        self.k = k
        self.det = det
        self.a0 = np.asarray(det.a0, dtype=float) if det.a0 is not None else 0.1 * np.eye(k)
        self.r0 = np.asarray(det.r0, dtype=float) if det.r0 is not None else np.eye(k)
        self.mu0 = np.zeros(k)
        self.sigma0 = np.eye(k)
        self.a = np.broadcast_to(self.a0, (n, k, k)).copy()
        self.r = np.broadcast_to(self.r0, (n, k, k)).copy()
        self.mu = np.zeros((n, k))
        self.sigma = np.broadcast_to(self.sigma0, (n, k, k)).copy()
        self.s = np.zeros(n)

    def keep(self, mask: np.ndarray) -> None:
        self.a, self.r = self.a[mask], self.r[mask]
        self.mu, self.sigma = self.mu[mask], self.sigma[mask]
        self.s = self.s[mask]

    def park(self, mask: np.ndarray) -> None:
        """Freeze stopped rows at their initial state so they stay bounded."""
        self.a[mask] = self.a0
        self.r[mask] = self.r0
        self.mu[mask] = self.mu0
        self.sigma[mask] = self.sigma0
        self.s[mask] = 0.0

    def step(self, y: np.ndarray) -> None:
        a, r, mu, sigma = self.a, self.r, self.mu, self.sigma
        k = self.k
        eye = np.eye(k)
        at = np.swapaxes(a, -1, -2)

        m = sym(a @ sigma @ at + r)
        j = np.linalg.inv(m + eye)
        sigma_new = sym(j @ m)
        mean_pred = (a @ mu[..., None])[..., 0]
        u = (j @ mean_pred[..., None])[..., 0]
        mu_new = u + (sigma_new @ y[..., None])[..., 0]

        nmat = sym(a @ sigma_new @ at + r)
        ni = nmat + eye
        q = np.linalg.inv(ni)
        v = (ni @ u[..., None])[..., 0]
        resid = y - v
        svec = (q @ resid[..., None])[..., 0]
        _, logdet_ni = np.linalg.slogdet(ni)
        h = -0.5 * (k * LOG_2PI + logdet_ni + np.sum(resid * svec, axis=1))
        inc = h + 0.5 * np.sum(y * y, axis=1) + 0.5 * k * LOG_2PI

        g_n = -0.5 * q + 0.5 * svec[..., :, None] * svec[..., None, :] \
            + svec[..., :, None] * u[..., None, :]
        p = (j @ (ni @ svec[..., None]))[..., 0]
        g_m = j @ at @ g_n @ a @ j - p[..., :, None] * u[..., None, :]
        grad_a = ((g_n + np.swapaxes(g_n, -1, -2)) @ a @ sigma_new
                  + p[..., :, None] * mu[..., None, :]
                  + (g_m + np.swapaxes(g_m, -1, -2)) @ a @ sigma)
        grad_r = sym(g_n + g_m)

        s_new = self.s + inc
        resets = s_new < 0
        self.s = np.where(resets, 0.0, s_new)
        a_up = a + self.det.step_size * grad_a
        r_up = _proj_pd_batch(r + self.det.step_size * grad_r, self.det.eig_floor)
        self.a = np.where(resets[:, None, None], self.a0, a_up)
        self.r = np.where(resets[:, None, None], self.r0, r_up)
        if self.det.reset_filter:
            self.mu = np.where(resets[:, None], self.mu0, mu_new)
            self.sigma = np.where(resets[:, None, None], self.sigma0, sigma_new)
        else:
            self.mu, self.sigma = mu_new, sigma_new


def _run_oga_block(f, init, seeds, t0, horizon, c, det: DetectorConfig):
    """Stopping times for one block of OGA-CuSum replicates."""
    stream = _ObsStream(f, init, t0, horizon, seeds)
    n = len(seeds)
    state = _OgaBatch(n, f.dim, det)
    taus = np.full(n, -1, dtype=np.int64)
    gidx = np.arange(n)
    stopped = np.zeros(n, dtype=bool)
    while stream.n > 0 and stream.t < horizon:
        t = stream.t + 1
        y = stream.step()
        state.step(y)
        newly = (~stopped) & (state.s >= c)
        if newly.any():
            taus[gidx[newly]] = t
            stopped |= newly
            state.park(newly)
        if stream.at_block_boundary() and stopped.any():
            keep = ~stopped
            if not keep.any():
                break
            stream.drop_rows(keep)
            state.keep(keep)
            gidx, stopped = gidx[keep], stopped[keep]
    return taus


def _run_oga_errors_block(f, init, seeds, horizon, snapshots, det: DetectorConfig):
    """Frobenius errors of the OGA estimates at snapshot times, per replicate.

    Runs on post-change data (change at 1) with no stopping; returns an array
    of shape (n, len(snapshots), 2) holding ||A_hat - A|| and ||R_hat - R||.
    """
    stream = _ObsStream(f, init, 1, horizon, seeds)
    n = len(seeds)
    state = _OgaBatch(n, f.dim, det)
    snap_at = {int(t): i for i, t in enumerate(snapshots)}
    out = np.empty((n, len(snapshots), 2))
    while stream.t < horizon:
        t = stream.t + 1
        y = stream.step()
        state.step(y)
        if t in snap_at:
            i = snap_at[t]
            out[:, i, 0] = np.linalg.norm(state.a - f.a, axis=(1, 2))
            out[:, i, 1] = np.linalg.norm(state.r - f.r, axis=(1, 2))
    return out


# ---------------------------------------------------------------------------
# block scheduling and parallel execution
# ---------------------------------------------------------------------------


def _block_seeds(master_seed: int, start: int, count: int) -> list[np.random.SeedSequence]:
    return [np.random.SeedSequence(master_seed, spawn_key=(start + i,)) for i in range(count)]


def _run_task(task):
    kind, f, init, master_seed, start, count, args = task
    seeds = _block_seeds(master_seed, start, count)
    if kind == "stops":
        det, t0, horizon, c = args
        if det.kind == "ergodic":
            return _run_ergodic_block(f, init, seeds, t0, horizon, c)
        if det.kind == "stationary":
            return _run_stationary_block(f, init, seeds, t0, horizon, c)
        return _run_oga_block(f, init, seeds, t0, horizon, c, det)
    if kind == "k":
        horizon, burn_in = args
        return _run_k_block(f, init, seeds, horizon, burn_in)
    if kind == "oga_errors":
        horizon, snapshots, det = args
        return _run_oga_errors_block(f, init, seeds, horizon, snapshots, det)
    raise ValueError(f"unknown task kind {kind!r}")


def _run_blocks(kind, f, init, cfg: McConfig, args) -> np.ndarray:
    tasks = []
    start = 0
    while start < cfg.replicates:
        count = min(REPLICATE_BLOCK, cfg.replicates - start)
        tasks.append((kind, f, init, cfg.master_seed, start, count, args))
        start += count
    if cfg.workers == 1 or len(tasks) == 1:
        parts = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_run_task, tasks))
    return np.concatenate(parts, axis=0)


def _resolve_init(f: FirstOrderModel, cfg: McConfig) -> InitialStateDist:
    return cfg.init if cfg.init is not None else stationary_init(f)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    n = values.shape[0]
    est = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return est, se


# ---------------------------------------------------------------------------
# public estimators
# ---------------------------------------------------------------------------


def estimate_arl(f: FirstOrderModel, detector, c: float, cfg: McConfig) -> ExperimentResult:
    """Mean run length to false alarm on pre-change-only data.

    Replicates that never alarm contribute max_horizon, making the estimate a
    lower bound on the true ARL; a warning is issued when more than 5% of
    replicates are censored.
    """
    if c <= 0:
        raise ValueError(f"threshold must be positive, got {c}")
    det = _as_detector(detector)
    init = _resolve_init(f, cfg)
    taus = _run_blocks("stops", f, init, cfg, (det, math.inf, cfg.max_horizon, c))
    censored = taus < 0
    values = np.where(censored, cfg.max_horizon, taus).astype(float)
    n_censored = int(censored.sum())
    if n_censored > 0.05 * cfg.replicates:
        warnings.warn(
            f"{n_censored}/{cfg.replicates} ARL replicates censored at horizon "
            f"{cfg.max_horizon}; the estimate is a lower bound",
            RuntimeWarning,
            stacklevel=2,
        )
    est, se = _mean_se(values)
    return ExperimentResult(estimate=est, std_error=se, n_censored=n_censored,
                            n=cfg.replicates)


def estimate_delay(
    f: FirstOrderModel, detector, c: float, t0: int, cfg: McConfig
) -> ExperimentResult:
    """Mean detection delay (tau - t0)+ for a change at t0.

    Replicates that alarm before t0 are discarded and counted in
    n_discarded; replicates that never alarm contribute the remaining
    horizon (a lower bound) and are counted in n_censored.

    Raises:
        RuntimeError: every replicate false-alarmed before t0.
    """
    if c <= 0:
        raise ValueError(f"threshold must be positive, got {c}")
    if t0 < 1 or t0 > cfg.max_horizon:
        raise ValueError(f"t0 must be in [1, max_horizon], got {t0}")
    det = _as_detector(detector)
    init = _resolve_init(f, cfg)
    taus = _run_blocks("stops", f, init, cfg, (det, float(t0), cfg.max_horizon, c))
    false_alarm = (taus >= 0) & (taus < t0)
    n_discarded = int(false_alarm.sum())
    if n_discarded == cfg.replicates:
        raise RuntimeError(f"all {cfg.replicates} replicates false-alarmed before t0={t0}")
    kept = taus[~false_alarm]
    censored = kept < 0
    delays = np.where(censored, cfg.max_horizon - t0, kept - t0).astype(float)
    est, se = _mean_se(delays)
    return ExperimentResult(estimate=est, std_error=se, n_censored=int(censored.sum()),
                            n=cfg.replicates, n_discarded=n_discarded)


def estimate_k(
    f: FirstOrderModel, horizon: int = 100_000, cfg: McConfig | None = None,
    burn_in: int = 1000
) -> ExperimentResult:
    """Estimate the post-change drift of the log-likelihood-ratio statistic.

    Per replicate: average of (conditional log-density minus no-change
    log-density) over one long post-change trajectory, burn-in discarded;
    averaged across replicates. Positive for every valid model.
    """
    if cfg is None:
        cfg = McConfig(replicates=20, max_horizon=horizon, master_seed=0)
    if burn_in < 0 or burn_in >= horizon:
        raise ValueError("burn_in must be in [0, horizon)")
    init = _resolve_init(f, cfg)
    k_hats = _run_blocks("k", f, init, cfg, (horizon, burn_in))
    est, se = _mean_se(k_hats)
    return ExperimentResult(estimate=est, std_error=se, n_censored=0, n=cfg.replicates)


def oga_estimation_errors(
    f: FirstOrderModel,
    cfg: McConfig,
    snapshots: tuple[int, ...],
    detector: DetectorConfig | None = None,
) -> np.ndarray:
    """Frobenius errors of the OGA parameter estimates on post-change data.

    Returns an array of shape (replicates, len(snapshots), 2) with the errors
    of the coefficient and innovation-covariance estimates at each snapshot
    time; diagnostics behind the estimate-convergence checks.
    """
    det = detector if detector is not None else DetectorConfig(kind="oga")
    if det.kind != "oga":
        raise ValueError("parameter-error diagnostics require an OGA detector")
    horizon = max(snapshots)
    if horizon > cfg.max_horizon:
        raise ValueError("snapshots exceed max_horizon")
    init = _resolve_init(f, cfg)
    return _run_blocks("oga_errors", f, init, cfg, (horizon, tuple(snapshots), det))


def wadd_vs_arl_curve(
    f: FirstOrderModel,
    detectors,
    gammas,
    cfg: McConfig,
    t0: int = 1,
) -> list[CurveRow]:
    """Measured (ARL, delay) pairs for each detector at each gamma.

    Thresholds are log(gamma); rows come out in (detector, gamma) order.
    """
    gammas = [float(g) for g in gammas]
    if sorted(gammas) != gammas:
        raise ValueError("gammas must be sorted ascending")
    rows = []
    for detector in detectors:
        det = _as_detector(detector)
        for gamma in gammas:
            c = select_threshold(gamma)
            arl = estimate_arl(f, det, c, cfg)
            delay = estimate_delay(f, det, c, t0, cfg)
            rows.append(CurveRow(
                detector=det.kind, gamma=gamma, threshold=c,
                arl_hat=arl.estimate, arl_se=arl.std_error,
                delay_hat=delay.estimate, delay_se=delay.std_error,
                n_censored=arl.n_censored,
            ))
    return rows


def write_curve_csv(rows: list[CurveRow], path: str | Path) -> None:
    """Write curve rows to CSV with 17-significant-digit doubles."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["detector", "gamma", "threshold", "arl_hat", "arl_se",
                         "delay_hat", "delay_se", "n_censored"])
        for r in rows:
            writer.writerow([
                r.detector, f"{r.gamma:.17g}", f"{r.threshold:.17g}",
                f"{r.arl_hat:.17g}", f"{r.arl_se:.17g}",
                f"{r.delay_hat:.17g}", f"{r.delay_se:.17g}", str(r.n_censored),
            ])


__all__ = [
    "CurveRow",
    "DetectorConfig",
    "ExperimentResult",
    "McConfig",
    "estimate_arl",
    "estimate_delay",
    "estimate_k",
    "oga_estimation_errors",
    "select_threshold",
    "wadd_vs_arl_curve",
    "write_curve_csv",
]
