"""AR disturbance-model types, validation, order lifting, and covariance solvers.

The observed system is: pure N(0, I) measurement noise before the change, and
after the change an AR(q) disturbance observed through that noise,

    x_t = A_1 x_{t-1} + ... + A_q x_{t-q} + w_t,   w_t ~ N(0, R_w),
    y_t = x_t + v_t,                               v_t ~ N(0, I).

Everything downstream (filtering, detection, experiments) works on the
first-order form, so this module also converts AR(q) models to an equivalent
AR(1) model on stacked blocks of q consecutive states.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._linalg import frobenius, spd_solve, sym

DEFAULT_TOL = 1e-12
MAX_FIXED_POINT_ITER = 10_000
_EIG_TOL = 1e-10


def _as_square(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class ARModel:
    """AR(q) disturbance model: coefficient matrices and innovation covariance.

    Attributes:
        coeffs: the q coefficient matrices A_1..A_q, each K x K.
        innovation_cov: K x K innovation covariance R_w.
    """

    coeffs: tuple[np.ndarray, ...]
    innovation_cov: np.ndarray

    def __post_init__(self):
        coeffs = tuple(_as_square(a, f"coeffs[{i}]") for i, a in enumerate(self.coeffs))
        if not coeffs:
            raise ValueError("need at least one coefficient matrix")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(
            self, "innovation_cov", _as_square(self.innovation_cov, "innovation_cov")
        )

    @property
    def dim(self) -> int:
        """Signal dimension K."""
        return self.coeffs[0].shape[0]

    @property
    def order(self) -> int:
        """AR order q."""
        return len(self.coeffs)


@dataclass(frozen=True, eq=False)
class FirstOrderModel:
    """AR(1) model x_t = A x_{t-1} + w_t with w_t ~ N(0, R).

    Attributes:
        a: coefficient matrix A.
        r: innovation covariance R (symmetric positive definite).
    """

    a: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        a = _as_square(self.a, "a")
        r = _as_square(self.r, "r")
        if a.shape != r.shape:
            raise ValueError(f"a and r must have the same shape, got {a.shape} vs {r.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", r)

    @property
    def dim(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True, eq=False)
class InitialStateDist:
    """Gaussian distribution of the disturbance state at the change point."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = _as_square(self.cov, "cov")
        if cov.shape[0] != mean.shape[0]:
            raise ValueError("mean and cov dimensions disagree")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass
class ValidationReport:
    """Outcome of model validation: ok iff no finding has severity 'error'."""

    findings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(sev == "error" for sev, _ in self.findings)

    def errors(self) -> list[str]:
        return [msg for sev, msg in self.findings if sev == "error"]

    def warnings(self) -> list[str]:
        return [msg for sev, msg in self.findings if sev == "warning"]

    def _add(self, severity: str, message: str) -> None:
        self.findings.append((severity, message))


def validate_model(m: ARModel) -> ValidationReport:
    """Check an AR model against its structural assumptions.

    Errors: non-finite entries, dimension mismatches, non-SPD innovation
    covariance, instability (operator norm >= 1 for q=1, spectral radius of
    the lifted coefficient matrix >= 1 for q>1). Nearly singular coefficient
    matrices are reported as warnings only; nothing here uses their inverses.
    """
    report = ValidationReport()
    k = m.dim

    finite = True
    for i, a in enumerate(m.coeffs):
        if a.shape != (k, k):
            report._add("error", f"coeffs[{i}] has shape {a.shape}, expected ({k}, {k})")
        if not np.all(np.isfinite(a)):
            report._add("error", f"coeffs[{i}] has non-finite entries")
            finite = False
    r = m.innovation_cov
    if r.shape != (k, k):
        report._add("error", f"innovation_cov has shape {r.shape}, expected ({k}, {k})")
    if not np.all(np.isfinite(r)):
        report._add("error", "innovation_cov has non-finite entries")
        finite = False
    if not report.ok or not finite:
        return report

    if not np.allclose(r, r.T, rtol=0.0, atol=1e-8 * max(1.0, float(np.abs(r).max()))):
        report._add("error", "innovation_cov is not symmetric")
    else:
        eigs = np.linalg.eigvalsh(sym(r))
        if eigs.min() <= _EIG_TOL:
            report._add(
                "error",
                f"innovation_cov is not positive definite (min eigenvalue {eigs.min():.3e})",
            )

    if m.order == 1:
        norm = float(np.linalg.norm(m.coeffs[0], ord=2))
        if norm >= 1.0:
            report._add("error", f"operator norm of A is {norm:.6g} >= 1 (unstable model)")
    else:
        a_tilde, _ = _lift_matrices(m.coeffs, r)
        rho = float(np.max(np.abs(np.linalg.eigvals(a_tilde))))
        if rho >= 1.0:
            report._add(
                "error", f"spectral radius of the lifted coefficient matrix is {rho:.6g} >= 1"
            )

    for i, a in enumerate(m.coeffs):
        cond = float(np.linalg.cond(a))
        if not np.isfinite(cond) or cond > 1e12:
            report._add("warning", f"coeffs[{i}] is singular or nearly singular (cond {cond:.3e})")

    return report


def _lift_matrices(
    coeffs: tuple[np.ndarray, ...], innovation_cov: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Stacked-block AR(1) form of an AR(q) model.

    Unrolls the AR(q) recursion over one block of q steps. Writing the j-th
    state of the current block as a linear map of the previous block plus a
    linear combination of the block's innovations gives the lifted coefficient
    matrix row by row and the stacked-noise covariance blockwise.
    """
    q = len(coeffs)
    k = coeffs[0].shape[0]
    r = innovation_cov
    if q == 1:
        return coeffs[0].copy(), r.copy()

    # rows[j][m]: coefficient of previous-block state m in current-block state j
    # noise[j][l]: coefficient of innovation l (within the block) in state j
    rows: list[list[np.ndarray]] = []
    noise: list[list[np.ndarray]] = []
    for j in range(q):
        row = [np.zeros((k, k)) for _ in range(q)]
        nse = [np.zeros((k, k)) for _ in range(q)]
        nse[j] = np.eye(k)
        for i, a_i in enumerate(coeffs, start=1):
            lag = j - i
            if lag >= 0:
                for m in range(q):
                    row[m] = row[m] + a_i @ rows[lag][m]
                for l in range(q):
                    nse[l] = nse[l] + a_i @ noise[lag][l]
            else:
                row[q + lag] = row[q + lag] + a_i
        rows.append(row)
        noise.append(nse)

    a_tilde = np.block(rows)
    r_tilde = np.empty((q * k, q * k))
    for j in range(q):
        for m in range(q):
            blk = np.zeros((k, k))
            for l in range(min(j, m) + 1):
                blk += noise[j][l] @ r @ noise[m][l].T
            r_tilde[j * k : (j + 1) * k, m * k : (m + 1) * k] = blk
    return a_tilde, sym(r_tilde)


def lift_to_first_order(m: ARModel) -> FirstOrderModel:
    """Convert an AR(q) model to the equivalent AR(1) model on q-step blocks.

    Raises:
        ValueError: if the model fails validation.
    """
    report = validate_model(m)
    if not report.ok:
        raise ValueError("invalid model: " + "; ".join(report.errors()))
    a_tilde, r_tilde = _lift_matrices(m.coeffs, m.innovation_cov)
    return FirstOrderModel(a=a_tilde, r=r_tilde)


def stationary_state_cov(
    f: FirstOrderModel, tol: float = DEFAULT_TOL, max_iter: int = MAX_FIXED_POINT_ITER
) -> np.ndarray:
    """Stationary covariance of the disturbance state, S = A S A^T + R.

    Fixed-point iteration from S = 0; stops when the Lyapunov residual
    ||S - A S A^T - R||_F drops below tol.

    Raises:
        RuntimeError: no convergence within max_iter (unstable A).
    """
    a, r = f.a, f.r
    s = np.zeros_like(r)
    for _ in range(max_iter):
        s_next = sym(r + a @ s @ a.T)
        if frobenius(s_next - a @ s_next @ a.T - r) <= tol:
            return s_next
        s = s_next
    raise RuntimeError(
        f"stationary covariance iteration did not converge in {max_iter} steps; "
        "the coefficient matrix is likely unstable"
    )


def steady_state_filter_cov(
    f: FirstOrderModel, tol: float = DEFAULT_TOL, max_iter: int = MAX_FIXED_POINT_ITER
) -> np.ndarray:
    """Fixed point S* of the forward-filter covariance recursion.

    Iterates S <- (A S A^T + R)(A S A^T + R + I)^{-1} from S = 0 until
    successive iterates differ by at most tol in Frobenius norm. The iterates
    contract geometrically for any stable model, so the start point is
    immaterial. Output is symmetrized.

    Raises:
        RuntimeError: iteration cap exceeded.
    """
    a, r = f.a, f.r
    eye = np.eye(f.dim)
    s = np.zeros_like(r)
    for _ in range(max_iter):
        m = sym(a @ s @ a.T + r)
        s_next = sym(spd_solve(m + eye, m, "filter covariance update"))
        if frobenius(s_next - s) <= tol:
            return s_next
        s = s_next
    raise RuntimeError(f"filter covariance iteration did not converge in {max_iter} steps")


def save_model(m: ARModel, path: str | Path) -> None:
    """Write a model to JSON: dim, order, coeffs, innovation_cov (row-major)."""
    payload = {
        "dim": m.dim,
        "order": m.order,
        "coeffs": [a.tolist() for a in m.coeffs],
        "innovation_cov": m.innovation_cov.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_model(path: str | Path) -> ARModel:
    """Read a model from its JSON file format.

    Raises:
        ValueError: malformed file or inconsistent dimensions.
    """
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    try:
        dim = int(payload["dim"])
        order = int(payload["order"])
        coeffs = tuple(np.asarray(a, dtype=float) for a in payload["coeffs"])
        innovation_cov = np.asarray(payload["innovation_cov"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path} is missing required model fields: {exc}") from exc
    m = ARModel(coeffs=coeffs, innovation_cov=innovation_cov)
    if m.dim != dim or m.order != order:
        raise ValueError(
            f"{path}: declared dim/order ({dim}, {order}) do not match "
            f"matrices ({m.dim}, {m.order})"
        )
    return m
