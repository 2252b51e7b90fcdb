"""Small shared linear-algebra helpers for SPD matrices."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve


def sym(x: np.ndarray) -> np.ndarray:
    """Symmetrize, (X + X^T)/2; batched over leading dimensions."""
    return 0.5 * (x + np.swapaxes(x, -1, -2))


def spd_cholesky(x: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor of an SPD matrix, ValueError if not SPD."""
    try:
        return np.linalg.cholesky(x)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{what} is not symmetric positive definite") from exc


def spd_solve(x: np.ndarray, b: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Solve x @ z = b for SPD x via Cholesky."""
    try:
        c = cho_factor(x, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{what} is not symmetric positive definite") from exc
    return cho_solve(c, b, check_finite=False)


def spd_logdet(x: np.ndarray) -> float:
    """log det of an SPD matrix via Cholesky."""
    l = spd_cholesky(x)
    return 2.0 * float(np.sum(np.log(np.diag(l))))


def frobenius(x: np.ndarray) -> float:
    return float(np.linalg.norm(x, ord="fro"))
