"""Hard thresholding pursuit and dense least squares.

HTP alternates a thresholded gradient step, which proposes a support of
size s, with a least-squares solve restricted to that support. Iterates
start from zero; by default the loop stops as soon as the support repeats,
capped by the theory-derived iteration budget.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import as_cmatrix, as_cvector, hard_threshold
from .theory import htp_constants

DEFAULT_DELTA = 0.08
_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class HtpConfig:
    s: int
    gamma: float = 1.0
    max_iters: Optional[int] = None  # None: use htp_iteration_budget(s)
    stop: str = "support-stable"  # or "budget-only"

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"sparsity level must be >= 1, got {self.s}")
        if self.gamma <= 0:
            raise ValueError(f"step size must be positive, got {self.gamma}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.stop not in ("support-stable", "budget-only"):
            raise ValueError(f"unknown stop rule {self.stop!r}")


@dataclass(frozen=True)
class HtpResult:
    x_hat: np.ndarray
    iterations: int
    support: np.ndarray
    residual_norm: float
    rank_deficient: bool = False


def htp_iteration_budget(s, delta=DEFAULT_DELTA):
    """Iteration count ceil(L + K s) sufficient for HTP convergence at RIP
    level delta."""
    if s < 1:
        raise ValueError(f"sparsity level must be >= 1, got {s}")
    c = htp_constants(delta)
    return int(np.ceil(c.L + c.K * s))


def least_squares(Phi, b):
    """Minimum-norm minimizer of ||b - Phi x||_2."""
    Phi = as_cmatrix(Phi)
    b = as_cvector(b)
    if Phi.shape[0] != b.size:
        raise ValueError(f"Phi has {Phi.shape[0]} rows but b has length {b.size}")
    x, _, _, _ = np.linalg.lstsq(Phi, b, rcond=_RANK_RTOL)
    return x


def _restricted_ls(Phi, b, J):
    """LS solve on columns J; returns (full-length solution, rank_deficient)."""
    sub = Phi[:, J]
    coef, _, rank, _ = np.linalg.lstsq(sub, b, rcond=_RANK_RTOL)
    x = np.zeros(Phi.shape[1], dtype=np.complex128)
    x[J] = coef
    return x, rank < len(J)


def htp(Phi, b, cfg):
    """Recover an s-sparse vector from b ~ Phi x by hard thresholding pursuit.

    Each iteration thresholds the gradient step
    x + gamma Phi^*(b - Phi x) to s terms and re-fits by least squares on
    the selected support. A rank-deficient restricted solve falls back to
    the minimum-norm solution and is flagged on the result.
    """
    Phi = as_cmatrix(Phi)
    b = as_cvector(b)
    if Phi.shape[0] != b.size:
        raise ValueError(f"Phi has {Phi.shape[0]} rows but b has length {b.size}")
    budget = cfg.max_iters if cfg.max_iters is not None else htp_iteration_budget(cfg.s)

    x = np.zeros(Phi.shape[1], dtype=np.complex128)
    prev_support = None
    rank_flag = False
    iterations = 0
    for _ in range(budget):
        iterations += 1
        grad_step = x + cfg.gamma * (Phi.conj().T @ (b - Phi @ x))
        J = np.flatnonzero(hard_threshold(grad_step, cfg.s))
        if J.size == 0:
            x = np.zeros_like(x)
            prev_support = J
            break
        x, deficient = _restricted_ls(Phi, b, J)
        rank_flag = rank_flag or deficient
        if cfg.stop == "support-stable" and prev_support is not None and np.array_equal(
            J, prev_support
        ):
            prev_support = J
            break
        prev_support = J
    support = np.flatnonzero(x)
    residual = float(np.linalg.norm(b - Phi @ x))
    return HtpResult(x, iterations, support, residual, rank_flag)
