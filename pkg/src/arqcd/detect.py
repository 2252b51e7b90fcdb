"""Sequential change detectors: Ergodic CuSum, stationary CuSum, OGA-CuSum.

All three accumulate clamped log-likelihood-ratio increments and alarm when
the statistic crosses a threshold. The Ergodic CuSum scores each observation
with the exact conditional density from the forward filter anchored at change
point 1; the stationary CuSum ignores temporal dependence and scores against
the stationary observation law; the OGA-CuSum handles unknown disturbance
parameters by online gradient ascent on the estimated conditional
log-likelihood, resetting its estimates whenever the statistic hits zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._linalg import frobenius, spd_cholesky, sym
from .filtering import LOG_2PI, ForwardState, forward_init, forward_step, log_p_infty
from .model import FirstOrderModel, InitialStateDist


@dataclass(frozen=True)
class Alarm:
    """Stopping time (1-based sample index) and the statistic that crossed."""

    stopping_time: int
    statistic_at_stop: float


def proj_pd(x: np.ndarray, eps: float) -> np.ndarray:
    """Project a square matrix onto {symmetric, eigenvalues >= eps}.

    Symmetrizes the input, floors the eigenvalues at eps, and reassembles.
    Idempotent, and Frobenius-nearest among feasible matrices to the
    symmetrized input.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    eigval, eigvec = np.linalg.eigh(sym(np.asarray(x, dtype=float)))
    return sym((eigvec * np.maximum(eigval, eps)) @ eigvec.T)


def _oga_core(a, r, mu, sigma, y):
    """One estimated filter step plus the gradient of its conditional score.

    Returns (mu_new, sigma_new, h, grad_a, grad_r). h is the estimated
    conditional log-density of y obtained by pushing (mu, sigma) through one
    filter step under parameters (a, r) and evaluating the fixed-covariance
    score at the updated pair; grad_a / grad_r differentiate h through that
    one step, treating the incoming (mu, sigma) as constants.
    """
    k = y.shape[0]
    eye = np.eye(k)

    m = sym(a @ sigma @ a.T + r)
    j = np.linalg.inv(m + eye)
    sigma_new = sym(j @ m)
    mean_pred = a @ mu
    u = j @ mean_pred
    mu_new = u + sigma_new @ y

    n = sym(a @ sigma_new @ a.T + r)
    ni = n + eye
    q = np.linalg.inv(ni)
    v = ni @ u
    resid = y - v
    s = q @ resid
    _, logdet_ni = np.linalg.slogdet(ni)
    h = -0.5 * (k * LOG_2PI + logdet_ni + float(resid @ s))

    g_n = -0.5 * q + 0.5 * np.outer(s, s) + np.outer(s, u)
    p = j @ (ni @ s)
    g_m = j @ a.T @ g_n @ a @ j - np.outer(p, u)
    grad_a = (g_n + g_n.T) @ a @ sigma_new + np.outer(p, mu) + (g_m + g_m.T) @ a @ sigma
    grad_r = sym(g_n + g_m)
    return mu_new, sigma_new, h, grad_a, grad_r


def grad_h_hat(a_hat, r_hat, mu_hat_t, sigma_hat_t, y_next):
    """Gradient of the estimated conditional log-likelihood w.r.t. (A, R).

    Args:
        a_hat, r_hat: current parameter estimates (r_hat must be SPD).
        mu_hat_t, sigma_hat_t: filter state before absorbing y_next.
        y_next: the new observation.

    Returns:
        (grad_a, grad_r, h_value); grad_r is symmetrized. Both gradients
        match central finite differences of h_value.

    Raises:
        ValueError: r_hat not SPD.
    """
    r_hat = np.asarray(r_hat, dtype=float)
    spd_cholesky(sym(r_hat), "r_hat")
    _, _, h, grad_a, grad_r = _oga_core(
        np.asarray(a_hat, dtype=float),
        r_hat,
        np.asarray(mu_hat_t, dtype=float),
        np.asarray(sigma_hat_t, dtype=float),
        np.asarray(y_next, dtype=float),
    )
    return grad_a, grad_r, h


class ErgodicCusum:
    """CuSum on the exact likelihood ratio anchored at change point 1.

    The forward filter runs from the first observation and is never reset;
    clamping at zero restarts the statistic only. Increments are
    log p(y_t | y_1..y_{t-1}) - log p_inf(y_t).
    """

    def __init__(self, model: FirstOrderModel, init: InitialStateDist):
        if init.dim != model.dim:
            raise ValueError("init distribution and model dimensions disagree")
        self.model = model
        self.init = init
        self.reset()

    def reset(self) -> None:
        self.forward: ForwardState | None = None
        self.s = 0.0
        self.log_l = 0.0
        self.t = 0
        self.last_increment = 0.0

    @property
    def statistic(self) -> float:
        return self.s

    def update(self, y: np.ndarray) -> float:
        """Absorb one observation; returns the new statistic."""
        y = np.asarray(y, dtype=float)
        if self.forward is None:
            res = forward_init(self.init, y)
        else:
            res = forward_step(self.forward, y, self.model)
        self.forward = res.state
        inc = res.log_cond - log_p_infty(y)
        self.last_increment = inc
        self.log_l += inc
        self.s = max(0.0, self.s + inc)
        self.t += 1
        return self.s


class StationaryCusum:
    """I.i.d. CuSum against the stationary observation law N(0, S + I).

    Exact as a CuSum because both densities are per-sample; S + I is the
    stationary disturbance covariance plus unit measurement noise.
    """

    def __init__(self, stationary_obs_cov: np.ndarray):
        c = sym(np.asarray(stationary_obs_cov, dtype=float))
        l = spd_cholesky(c, "stationary observation covariance")
        self._chol = l
        self._logdet = 2.0 * float(np.sum(np.log(np.diag(l))))
        self.dim = c.shape[0]
        self.reset()

    def reset(self) -> None:
        self.s = 0.0
        self.t = 0
        self.last_increment = 0.0

    @property
    def statistic(self) -> float:
        return self.s

    def increment(self, y: np.ndarray) -> float:
        """log pi(y) - log p_inf(y) for one observation."""
        z = np.linalg.solve(self._chol, y)
        return float(-0.5 * self._logdet - 0.5 * z @ z + 0.5 * y @ y)

    def update(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        inc = self.increment(y)
        self.last_increment = inc
        self.s = max(0.0, self.s + inc)
        self.t += 1
        return self.s


class OgaCusum:
    """Online-gradient-ascent CuSum for unknown disturbance parameters.

    Each step: advance the estimated filter, score the observation, add the
    increment to the statistic. If the statistic would go negative, the
    parameter estimates (and, by default, the filter state) are reset to
    their initial values and the statistic restarts at zero; otherwise the
    parameter estimates take one gradient-ascent step, with the innovation
    covariance estimate projected back to the PD cone.
    """

    def __init__(
        self,
        dim: int,
        step_size: float = 1e-3,
        eig_floor: float = 1e-4,
        a0: np.ndarray | None = None,
        r0: np.ndarray | None = None,
        mu0: np.ndarray | None = None,
        sigma0: np.ndarray | None = None,
        reset_filter: bool = True,
    ):
        if step_size <= 0:
            raise ValueError("step_size must be positive")
        if eig_floor <= 0:
            raise ValueError("eig_floor must be positive")
        self.dim = dim
        self.step_size = step_size
        self.eig_floor = eig_floor
        self.reset_filter = reset_filter
        self._a0 = np.asarray(a0, dtype=float) if a0 is not None else 0.1 * np.eye(dim)
        self._r0 = np.asarray(r0, dtype=float) if r0 is not None else np.eye(dim)
        self._mu0 = np.asarray(mu0, dtype=float) if mu0 is not None else np.zeros(dim)
        self._sigma0 = np.asarray(sigma0, dtype=float) if sigma0 is not None else np.eye(dim)
        spd_cholesky(sym(self._r0), "r0")
        spd_cholesky(sym(self._sigma0), "sigma0")
        self.reset()

    def reset(self) -> None:
        self.a_hat = self._a0.copy()
        self.r_hat = self._r0.copy()
        self.mu_hat = self._mu0.copy()
        self.sigma_hat = self._sigma0.copy()
        self.s_hat = 0.0
        self.log_l_hat = 0.0
        self.t = 0
        self.last_increment = 0.0

    @property
    def statistic(self) -> float:
        return self.s_hat

    def update(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        mu_new, sigma_new, h, grad_a, grad_r = _oga_core(
            self.a_hat, self.r_hat, self.mu_hat, self.sigma_hat, y
        )
        inc = h - log_p_infty(y)
        self.last_increment = inc
        self.t += 1
        if self.s_hat + inc < 0:
            self.a_hat = self._a0.copy()
            self.r_hat = self._r0.copy()
            self.s_hat = 0.0
            self.log_l_hat = 0.0
            if self.reset_filter:
                self.mu_hat = self._mu0.copy()
                self.sigma_hat = self._sigma0.copy()
            else:
                self.mu_hat = mu_new
                self.sigma_hat = sigma_new
        else:
            self.s_hat += inc
            self.log_l_hat += inc
            self.a_hat = self.a_hat + self.step_size * grad_a
            self.r_hat = proj_pd(self.r_hat + self.step_size * grad_r, self.eig_floor)
            self.mu_hat = mu_new
            self.sigma_hat = sigma_new
        return self.s_hat


class BlockedDetector:
    """Feed a detector for a lifted AR(q) model with blocks of q observations.

    Buffers incoming K-vectors and advances the inner detector once per full
    block; the statistic is constant between block boundaries. Stopping times
    reported through this wrapper are in sample units (multiples of q).
    """

    def __init__(self, inner, block_size: int):
        if block_size < 1:
            raise ValueError("block_size must be >= 1")
        self.inner = inner
        self.block_size = block_size
        self.reset()

    def reset(self) -> None:
        self.inner.reset()
        self._buffer: list[np.ndarray] = []
        self.t = 0
        self.last_increment = 0.0

    @property
    def statistic(self) -> float:
        return self.inner.statistic

    def update(self, y: np.ndarray) -> float:
        self._buffer.append(np.asarray(y, dtype=float))
        self.t += 1
        if len(self._buffer) == self.block_size:
            block = np.concatenate(self._buffer)
            self._buffer = []
            stat = self.inner.update(block)
            self.last_increment = self.inner.last_increment
            return stat
        self.last_increment = 0.0
        return self.inner.statistic


def run_detector(detector, observations: np.ndarray, threshold: float) -> Alarm | None:
    """First time the statistic reaches the threshold, or None if it never does.

    The caller handles censoring when None is returned (the trajectory ended
    before an alarm).
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    for t, y in enumerate(np.atleast_2d(np.asarray(observations, dtype=float)), start=1):
        stat = detector.update(y)
        if stat >= threshold:
            return Alarm(stopping_time=t, statistic_at_stop=stat)
    return None


def run_with_trace(
    detector,
    observations: np.ndarray,
    threshold: float,
    trace_path: str | Path,
    true_model: FirstOrderModel | None = None,
) -> Alarm | None:
    """run_detector plus a per-step CSV trace: t, increment, statistic, stopped.

    When the detector carries parameter estimates and a true model is given,
    Frobenius errors of the estimates are appended per row.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    with_errors = true_model is not None and hasattr(detector, "a_hat")
    header = ["t", "increment", "statistic", "stopped"]
    if with_errors:
        header += ["a_err_fro", "r_err_fro"]

    alarm = None
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t, y in enumerate(np.atleast_2d(np.asarray(observations, dtype=float)), start=1):
            stat = detector.update(y)
            stopped = stat >= threshold
            row = [str(t), f"{detector.last_increment:.17g}", f"{stat:.17g}",
                   "1" if stopped else "0"]
            if with_errors:
                row += [f"{frobenius(detector.a_hat - true_model.a):.17g}",
                        f"{frobenius(detector.r_hat - true_model.r):.17g}"]
            writer.writerow(row)
            if stopped:
                alarm = Alarm(stopping_time=t, statistic_at_stop=stat)
                break
    return alarm


def max_form_statistic(increments: np.ndarray) -> float:
    """CuSum statistic from raw increments by the defining max form.

    max over 0 <= i <= t of the sum of increments after i, each tail sum
    accumulated left to right. Brute-force reference for the recursive
    update.
    """
    increments = np.asarray(increments, dtype=float)
    best = 0.0
    for i in range(increments.shape[0]):
        tail = 0.0
        for x in increments[i:]:
            tail += x
        best = max(best, tail)
    return best


__all__ = [
    "Alarm",
    "BlockedDetector",
    "ErgodicCusum",
    "OgaCusum",
    "StationaryCusum",
    "grad_h_hat",
    "max_form_statistic",
    "proj_pd",
    "run_detector",
    "run_with_trace",
]
