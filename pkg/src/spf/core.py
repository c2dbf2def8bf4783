"""Outer alternating-minimization drivers.

spf_run alternates sparse (HTP) updates of the two factors of a rank-one
matrix; pf_run is the same loop with both updates forced to plain least
squares. The loop follows the factored update order literally: normalize v
at the top, update u, normalize u, update v; the returned estimate is
u_t v_t^* with the final v left un-normalized.
"""

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .exceptions import DegenerateIterateError
from .htp import HtpConfig, htp, least_squares
from .linalg import as_cvector, subspace_sin
from .operators import apply, build_F, build_G

_EPS = 1e-300


@dataclass(frozen=True)
class SpfConfig:
    s1: int
    s2: int
    max_outer: int = 50
    rel_change_tol: float = 1e-8
    htp: Optional[HtpConfig] = None  # template; s is overridden per factor
    oracle: Optional[object] = None  # SparseRankOneModel for angle tracing

    def __post_init__(self):
        if self.s1 < 1 or self.s2 < 1:
            raise ValueError("sparsity levels must be >= 1")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")


@dataclass
class TraceRow:
    t: int
    residual: float
    sin_theta: Optional[float] = None
    sin_phi: Optional[float] = None
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None


@dataclass
class RecoveryTrace:
    rows: list = field(default_factory=list)
    stop_reason: str = ""

    def to_csv(self):
        """Render the trace as CSV: t, residual, sin_theta, sin_phi,
        stop_reason (populated on the last row only)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "residual", "sin_theta", "sin_phi", "stop_reason"])
        for i, row in enumerate(self.rows):
            reason = self.stop_reason if i == len(self.rows) - 1 else ""
            writer.writerow(
                [
                    row.t,
                    format(row.residual, ".17g"),
                    "" if row.sin_theta is None else format(row.sin_theta, ".17g"),
                    "" if row.sin_phi is None else format(row.sin_phi, ".17g"),
                    reason,
                ]
            )
        return buf.getvalue()


def _factor_htp_config(template, s):
    if template is None:
        return HtpConfig(s=s)
    return replace(template, s=s)


def spf_run(A, b, cfg, v0):
    """Run sparse power factorization from the starting vector v0.

    Returns (X_hat, trace). Stops when the relative Frobenius change of
    u_t v_t^* drops below cfg.rel_change_tol or after cfg.max_outer outer
    iterations. A zero u-update raises DegenerateIterateError carrying the
    trace collected so far.
    """
    b = as_cvector(b)
    v0 = as_cvector(v0)
    if b.size != A.m:
        raise ValueError(f"b has length {b.size}, operator expects {A.m}")
    if v0.size != A.n2:
        raise ValueError(f"v0 has length {v0.size}, operator expects {A.n2}")
    if cfg.s1 > A.n1 or cfg.s2 > A.n2:
        raise ValueError("sparsity levels exceed matrix dimensions")
    if np.linalg.norm(v0) == 0:
        raise DegenerateIterateError("v0 is the zero vector", RecoveryTrace())

    trace = RecoveryTrace()
    v = v0.copy()
    X_prev = None
    u = None
    for t in range(1, cfg.max_outer + 1):
        v = v / np.linalg.norm(v)
        F = build_F(A, v)
        if cfg.s1 < A.n1:
            u = htp(F, b, _factor_htp_config(cfg.htp, cfg.s1)).x_hat
        else:
            u = least_squares(F, b)
        nu_norm = np.linalg.norm(u)
        if nu_norm == 0:
            trace.stop_reason = "degenerate-u"
            raise DegenerateIterateError(
                f"u collapsed to zero at outer iteration {t}", trace
            )
        u = u / nu_norm
        G = build_G(A, u)
        if cfg.s2 < A.n2:
            v = htp(G, b.conj(), _factor_htp_config(cfg.htp, cfg.s2)).x_hat
        else:
            v = least_squares(G, b.conj())
        if np.linalg.norm(v) == 0:
            trace.stop_reason = "degenerate-v"
            raise DegenerateIterateError(
                f"v collapsed to zero at outer iteration {t}", trace
            )
        X = np.outer(u, v.conj())
        residual = float(np.linalg.norm(b - apply(A, X)))
        row = TraceRow(t, residual, u=u.copy(), v=v.copy())
        if cfg.oracle is not None:
            row.sin_theta = subspace_sin(cfg.oracle.u, u)
            row.sin_phi = subspace_sin(cfg.oracle.v, v)
        trace.rows.append(row)
        if X_prev is not None:
            change = np.linalg.norm(X - X_prev) / max(np.linalg.norm(X), _EPS)
            if change < cfg.rel_change_tol:
                trace.stop_reason = "converged"
                return X, trace
        X_prev = X
    trace.stop_reason = "max-outer"
    return X_prev, trace


def pf_run(A, b, cfg, v0):
    """Plain power factorization: both factor updates forced to least squares."""
    dense = replace(cfg, s1=A.n1, s2=A.n2)
    return spf_run(A, b, dense, v0)


def reconstruction_snr(X_hat, X, cap=50.0):
    """min(cap, 20 log10(||X||_F / ||X_hat - X||_F)) in dB."""
    X = np.asarray(X, dtype=np.complex128)
    X_hat = np.asarray(X_hat, dtype=np.complex128)
    if X_hat.shape != X.shape:
        raise ValueError(f"shape mismatch {X_hat.shape} vs {X.shape}")
    nrm = np.linalg.norm(X)
    if nrm == 0:
        raise ValueError("reference matrix is zero")
    err = np.linalg.norm(X_hat - X)
    if err == 0:
        return float(cap)
    return float(min(cap, 20.0 * np.log10(nrm / err)))


def noise_amplification(X_hat, X, nu, cap=3.0):
    """min(cap, log10(||X_hat - X||_F / (nu ||X||_F)))."""
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    X = np.asarray(X, dtype=np.complex128)
    X_hat = np.asarray(X_hat, dtype=np.complex128)
    if X_hat.shape != X.shape:
        raise ValueError(f"shape mismatch {X_hat.shape} vs {X.shape}")
    nrm = np.linalg.norm(X)
    if nrm == 0:
        raise ValueError("reference matrix is zero")
    err = np.linalg.norm(X_hat - X)
    if err == 0:
        return float("-inf")
    return float(min(cap, np.log10(err / (nu * nrm))))
