"""Trajectory generation under the no-change and change-at-t0 laws.

Observations are N(0, I) noise before the change point; from the change point
on they are the AR(1) disturbance state plus fresh N(0, I) noise. Replicate
streams are derived from a master seed with numpy's splittable SeedSequence,
so Monte-Carlo replicates are independent and individually reproducible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from ._linalg import spd_cholesky
from .model import FirstOrderModel, InitialStateDist, stationary_state_cov

INFINITY = math.inf


@dataclass(frozen=True, eq=False)
class ChangeConfig:
    """Where the change happens and how long to simulate.

    Attributes:
        change_point: 1-based time of the first post-change sample, or
            math.inf for a pure pre-change trajectory.
        length: number of samples T.
        init: distribution of the disturbance state at the change point.
    """

    change_point: float
    length: int
    init: InitialStateDist

    def __post_init__(self):
        t0 = self.change_point
        if math.isinf(t0):
            if t0 < 0:
                raise ValueError("change_point must be positive or +infinity")
        elif t0 != int(t0) or t0 < 1:
            raise ValueError(f"change_point must be a positive integer or infinity, got {t0}")
        elif t0 > self.length:
            raise ValueError(
                f"finite change_point ({t0:.0f}) must be <= trajectory length ({self.length})"
            )
        if self.length < 1:
            raise ValueError("length must be >= 1")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A simulated observation sequence with known change point.

    hidden_states holds the disturbance states x_{t0}..x_T (None when the
    change point is infinite).
    """

    observations: np.ndarray
    change_point: float
    seed: int
    hidden_states: np.ndarray | None = None

    @property
    def length(self) -> int:
        return self.observations.shape[0]

    @property
    def dim(self) -> int:
        return self.observations.shape[1]

    def is_post_change(self, t: int) -> bool:
        """Whether 1-based time t is at or after the change point."""
        return t >= self.change_point


def replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-replicate generator keyed by (master_seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def generate_trajectory(
    f: FirstOrderModel,
    cfg: ChangeConfig,
    seed: int,
    rng: np.random.Generator | None = None,
) -> Trajectory:
    """Simulate one trajectory; deterministic given (model, cfg, seed).

    Pre-change samples are drawn first in one block, then the initial state
    and one row of (innovation, noise) draws per post-change step. The draw
    order is part of the reproducibility contract relied on by the
    Monte-Carlo harness. Passing rng overrides the seed-derived generator
    (the harness uses this to replay a specific replicate stream).
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
    k = f.dim
    t_len = cfg.length
    t0 = cfg.change_point

    n_pre = t_len if math.isinf(t0) else int(t0) - 1
    obs = np.empty((t_len, k))
    if n_pre > 0:
        obs[:n_pre] = rng.standard_normal((n_pre, k))
    if math.isinf(t0):
        return Trajectory(observations=obs, change_point=t0, seed=seed)

    if cfg.init.dim != k:
        raise ValueError(f"init distribution has dim {cfg.init.dim}, model has dim {k}")
    l_init = spd_cholesky(cfg.init.cov, "init covariance")
    l_innov = spd_cholesky(f.r, "innovation covariance")

    n_post = t_len - n_pre
    z = rng.standard_normal((n_post, 2 * k))
    hidden = np.empty((n_post, k))
    x = cfg.init.mean + l_init @ z[0, :k]
    hidden[0] = x
    obs[n_pre] = x + z[0, k:]
    for j in range(1, n_post):
        x = f.a @ x + l_innov @ z[j, :k]
        hidden[j] = x
        obs[n_pre + j] = x + z[j, k:]
    return Trajectory(observations=obs, change_point=t0, seed=seed, hidden_states=hidden)


def stationary_init(f: FirstOrderModel) -> InitialStateDist:
    """Default change-point state distribution: N(0, stationary covariance)."""
    return InitialStateDist(mean=np.zeros(f.dim), cov=stationary_state_cov(f))


def whiten(samples: np.ndarray, noise_cov: np.ndarray) -> np.ndarray:
    """Map samples y to L^{-1} y where noise_cov = L L^T (lower Cholesky).

    Accepts a single vector or an array of row vectors.

    Raises:
        ValueError: noise_cov not SPD.
    """
    l = spd_cholesky(np.asarray(noise_cov, dtype=float), "noise covariance")
    y = np.asarray(samples, dtype=float)
    if y.ndim == 1:
        return solve_triangular(l, y, lower=True, check_finite=False)
    return solve_triangular(l, y.T, lower=True, check_finite=False).T


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    """Dump a trajectory as CSV: t, y_1..y_K, is_post_change."""
    k = traj.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"y_{i + 1}" for i in range(k)] + ["is_post_change"])
        for t in range(1, traj.length + 1):
            row = [str(t)]
            row += [f"{v:.17g}" for v in traj.observations[t - 1]]
            row.append("1" if traj.is_post_change(t) else "0")
            writer.writerow(row)


def read_trajectory_csv(path: str | Path) -> tuple[np.ndarray, float]:
    """Read observations back from the CSV dump; returns (observations, change_point).

    The change point is inferred as the first row flagged post-change
    (infinity when no row is flagged).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 3 or header[0] != "t" or header[-1] != "is_post_change":
            raise ValueError(f"{path} does not look like a trajectory CSV")
        k = len(header) - 2
        rows = []
        change_point = INFINITY
        for rec in reader:
            rows.append([float(v) for v in rec[1 : 1 + k]])
            if rec[-1] == "1" and math.isinf(change_point):
                change_point = float(rec[0])
    return np.asarray(rows), change_point
