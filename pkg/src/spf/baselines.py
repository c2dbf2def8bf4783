"""ADMM solvers for the convex comparison programs.

All variants solve  min J(Z)  s.t. A(Z) = b  with J either a single norm
(nuclear for LR, row mixed norm for RS) or the max of oracle-normalized
norms (RSLR, DS, DSLR). Single-norm programs use two-block ADMM
(prox + affine projection); max programs are solved in epigraph form by
consensus ADMM with one norm-cone copy per term.

These solvers exist for qualitative comparisons, not raw speed; the
penalty parameter is fixed for reproducibility.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import brentq

from .operators import apply as op_apply

VARIANTS = ("LR", "RS", "RSLR", "DS", "DSLR")


@dataclass(frozen=True)
class AdmmConfig:
    penalty: float = 1.0
    max_iters: int = 2000
    primal_tol: float = 1e-6
    dual_tol: float = 1e-6

    def __post_init__(self):
        if self.penalty <= 0:
            raise ValueError("penalty must be positive")
        if self.primal_tol <= 0 or self.dual_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class BpProblem:
    """Measurements plus the oracle norm weights the max-variants need."""

    operator: object
    b: np.ndarray
    weight_row: Optional[float] = None  # ||X||_{1,2}
    weight_col: Optional[float] = None  # ||X^*||_{1,2}
    weight_nuc: Optional[float] = None  # ||X||_*


@dataclass
class BpSolution:
    Z: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    gram_regularized: bool = False


def prox_nuclear(Z, t):
    """Soft-threshold the singular values of Z by t."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    if t == 0:
        return np.array(Z, dtype=np.complex128)
    U, S, Vh = np.linalg.svd(np.asarray(Z, dtype=np.complex128), full_matrices=False)
    S = np.maximum(S - t, 0.0)
    return (U * S) @ Vh


def prox_row_l12(Z, t):
    """Scale each row r of Z by max(0, 1 - t / ||r||_2)."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    Z = np.asarray(Z, dtype=np.complex128)
    norms = np.linalg.norm(Z, axis=1)
    scale = np.where(norms > t, 1.0 - t / np.maximum(norms, 1e-300), 0.0)
    return Z * scale[:, None]


class AffineProjector:
    """Frobenius projection onto {Z : A(Z) = b}, with the m x m Gram
    factorization of A A^* computed once per operator."""

    def __init__(self, A, b, ridge=1e-12):
        self.A = A
        self.b = np.asarray(b, dtype=np.complex128)
        Amat = A.matrices.conj().reshape(A.m, -1)
        self._Amat = Amat
        gram = Amat @ Amat.conj().T
        self.regularized = False
        try:
            self._factor = cho_factor(gram)
        except np.linalg.LinAlgError:
            self._factor = cho_factor(gram + ridge * np.eye(A.m))
            self.regularized = True

    def __call__(self, Z):
        r = self.b - op_apply(self.A, Z)
        w = cho_solve(self._factor, r)
        corr = (self._Amat.conj().T @ w).reshape(self.A.n1, self.A.n2)
        return Z + corr


def project_affine(A, b, Z):
    """One-shot feasibility projection Z + A^*(A A^*)^{-1} (b - A(Z))."""
    return AffineProjector(A, b)(Z)


def _epigraph_project(Z0, t0, weight, norm_value, prox):
    """Project (Z0, t0) onto {(Z, t): norm(Z) <= weight * t}.

    The projection satisfies Z = prox(Z0, lam/weight), t = t0 + lam for the
    lam solving norm(Z(lam))/weight = t0 + lam, found by bracketing.
    """
    h0 = norm_value(Z0)
    if h0 <= weight * t0:
        return np.array(Z0), t0

    def g(lam):
        return norm_value(prox(Z0, lam / weight)) / weight - t0 - lam

    hi = h0 / weight + max(0.0, -t0) + 1.0
    while g(hi) > 0:
        hi *= 2.0
    lam = brentq(g, 0.0, hi, xtol=1e-12, rtol=1e-12)
    return prox(Z0, lam / weight), t0 + lam


def _norm_nuclear(Z):
    return float(np.linalg.svd(Z, compute_uv=False).sum())


def _norm_row_l12(Z):
    return float(np.linalg.norm(Z, axis=1).sum())


def _single_norm_admm(A, b, prox, cfg):
    proj = AffineProjector(A, b)
    shape = (A.n1, A.n2)
    Y = np.zeros(shape, dtype=np.complex128)
    U = np.zeros(shape, dtype=np.complex128)
    rho = cfg.penalty
    scale = max(float(np.linalg.norm(b)), 1.0)
    X = proj(Y - U)
    for k in range(1, cfg.max_iters + 1):
        X = proj(Y - U)
        Y_new = prox(X + U, 1.0 / rho)
        dual = rho * float(np.linalg.norm(Y_new - Y))
        Y = Y_new
        U = U + X - Y
        primal = float(np.linalg.norm(X - Y))
        if primal <= cfg.primal_tol * scale and dual <= cfg.dual_tol * scale:
            return BpSolution(X, k, True, primal, dual, proj.regularized)
    return BpSolution(X, cfg.max_iters, False, primal, dual, proj.regularized)


# cone descriptors: (transpose?, norm_value, prox, weight attribute)
_CONES = {
    "row": (False, _norm_row_l12, prox_row_l12, "weight_row"),
    "col": (True, _norm_row_l12, prox_row_l12, "weight_col"),
    "nuc": (False, _norm_nuclear, prox_nuclear, "weight_nuc"),
}

_VARIANT_CONES = {
    "RSLR": ("row", "nuc"),
    "DS": ("row", "col"),
    "DSLR": ("row", "col", "nuc"),
}


def _max_norm_admm(problem, cones, cfg):
    A = problem.operator
    b = problem.b
    proj = AffineProjector(A, b)
    shape = (A.n1, A.n2)
    rho = cfg.penalty
    n_cones = len(cones)
    n_blocks = n_cones + 1  # plus the affine block
    scale = max(float(np.linalg.norm(b)), 1.0)

    weights = []
    for name in cones:
        w = getattr(problem, _CONES[name][3])
        if w is None or w <= 0:
            raise ValueError(f"variant requires positive oracle weight for {name!r}")
        weights.append(w)

    Zbar = np.zeros(shape, dtype=np.complex128)
    tbar = 0.0
    UZ = [np.zeros(shape, dtype=np.complex128) for _ in range(n_blocks)]
    Ut = [0.0 for _ in range(n_cones)]
    primal = dual = float("inf")
    for k in range(1, cfg.max_iters + 1):
        ZS = []
        tS = []
        for i, name in enumerate(cones):
            transpose, norm_value, prox, _ = _CONES[name]
            Zin = Zbar - UZ[i]
            tin = tbar - Ut[i]
            if transpose:
                Zi, ti = _epigraph_project(
                    Zin.conj().T, tin, weights[i], norm_value, prox
                )
                Zi = Zi.conj().T
            else:
                Zi, ti = _epigraph_project(Zin, tin, weights[i], norm_value, prox)
            ZS.append(Zi)
            tS.append(ti)
        Z_aff = proj(Zbar - UZ[n_cones])
        ZS.append(Z_aff)

        Zbar_new = sum(Zi + Ui for Zi, Ui in zip(ZS, UZ)) / n_blocks
        tbar_new = sum(ti + ui for ti, ui in zip(tS, Ut)) / n_cones - 1.0 / (
            rho * n_cones
        )
        dual = rho * float(np.linalg.norm(Zbar_new - Zbar))
        Zbar, tbar = Zbar_new, tbar_new

        primal = 0.0
        for i in range(n_blocks):
            UZ[i] = UZ[i] + ZS[i] - Zbar
            primal = max(primal, float(np.linalg.norm(ZS[i] - Zbar)))
        for i in range(n_cones):
            Ut[i] = Ut[i] + tS[i] - tbar
            primal = max(primal, abs(tS[i] - tbar))

        if primal <= cfg.primal_tol * scale and dual <= cfg.dual_tol * scale:
            return BpSolution(proj(Zbar), k, True, primal, dual, proj.regularized)
    return BpSolution(proj(Zbar), cfg.max_iters, False, primal, dual, proj.regularized)


def bp_solve(problem, variant, cfg=AdmmConfig()):
    """Solve a basis-pursuit comparison program.

    LR minimizes the nuclear norm, RS the row mixed norm; RSLR, DS, DSLR
    minimize the max of oracle-normalized norms subject to A(Z) = b. The
    returned solution carries the final residuals and a converged flag.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if variant == "LR":
        return _single_norm_admm(problem.operator, problem.b, prox_nuclear, cfg)
    if variant == "RS":
        return _single_norm_admm(problem.operator, problem.b, prox_row_l12, cfg)
    return _max_norm_admm(problem, _VARIANT_CONES[variant], cfg)
