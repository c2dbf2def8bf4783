"""Initialization schemes producing the starting vector v0.

All schemes work on the proxy matrix A*(b). Ties in row or column selection
are broken toward the lowest index so Monte-Carlo statistics are
reproducible. The exhaustive (optimal) scheme and the spectral row-sparse
scheme enumerate supports and are gated by an explicit budget.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .exceptions import CombinatorialBudgetError, DegenerateInputError
from .linalg import hard_threshold, sparse_norm
from .operators import adjoint

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class InitResult:
    v0: np.ndarray
    J1_hat: np.ndarray
    J2_hat: np.ndarray
    method: str


def _leading_right_singular(M):
    if not np.any(M):
        raise DegenerateInputError("proxy matrix is zero")
    _, _, Vh = np.linalg.svd(M, full_matrices=False)
    return Vh[0, :].conj()


def _top_indices(scores, k):
    """Indices of the k largest scores, lowest index first among ties."""
    order = np.argsort(-np.asarray(scores), kind="stable")
    return np.sort(order[:k])


def _restrict(P, rows, cols):
    out = np.zeros_like(P)
    ix = np.ix_(rows, cols)
    out[ix] = P[ix]
    return out


def support_pair_count(n1, s1, n2, s2):
    from math import comb

    return comb(n1, s1) * comb(n2, s2)


def init_optimal(A, b, s1, s2, budget=DEFAULT_BUDGET):
    """Exhaustively maximize the spectral norm of the doubly restricted proxy.

    Searches every (|J1|=s1, |J2|=s2) pair, takes the pair with the largest
    spectral norm of the restriction of A*(b) (lowest-lexicographic pair on
    ties), and returns its leading right singular vector.
    """
    count = support_pair_count(A.n1, s1, A.n2, s2)
    if count > budget:
        raise CombinatorialBudgetError(count, budget)
    P = adjoint(A, b)
    if not np.any(P):
        raise DegenerateInputError("proxy matrix is zero")
    best = None
    for rows in combinations(range(A.n1), s1):
        sub = P[np.asarray(rows), :]
        for cols in combinations(range(A.n2), s2):
            norm = np.linalg.norm(sub[:, np.asarray(cols)], 2)
            if best is None or norm > best[0]:
                best = (norm, rows, cols)
    _, rows, cols = best
    restricted = _restrict(P, np.asarray(rows), np.asarray(cols))
    v0 = _leading_right_singular(restricted)
    return InitResult(
        v0, np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64), "optimal"
    )


def sparse_row_project(P, s1, s2):
    """Project onto matrices with <= s1 nonzero rows, each <= s2-sparse.

    Keeps the s1 rows with the largest s2-sparse norms (lowest index on
    ties) and replaces each kept row by its best s2-sparse approximation.
    Returns (projection, kept row indices).
    """
    P = np.asarray(P, dtype=np.complex128)
    scores = [sparse_norm(row, s2) for row in P]
    J1 = _top_indices(scores, s1)
    out = np.zeros_like(P)
    for j in J1:
        out[j] = hard_threshold(P[j], s2)
    return out, J1


def init_thresholding(A, b, s1, s2):
    """Thresholding initialization.

    Projects the proxy onto the doubly sparse set, selects the s2 columns
    of largest norm, and returns the leading right singular vector of the
    column-restricted projection.
    """
    P = adjoint(A, b)
    if not np.any(P):
        raise DegenerateInputError("proxy matrix is zero")
    PS, J1 = sparse_row_project(P, s1, s2)
    col_norms = np.linalg.norm(PS, axis=0)
    J2 = _top_indices(col_norms, s2)
    restricted = np.zeros_like(PS)
    restricted[:, J2] = PS[:, J2]
    v0 = _leading_right_singular(restricted)
    return InitResult(v0, J1, J2, "thresholding")


def init_rowsparse(A, b, s1, norm="frobenius", budget=DEFAULT_BUDGET):
    """Row-sparse initialization: select s1 rows of the proxy, then take the
    leading right singular vector of the row restriction.

    norm="frobenius" sorts rows by their l2 norms; norm="spectral"
    enumerates all size-s1 row subsets (budget-gated) and maximizes the
    spectral norm of the restriction.
    """
    from math import comb

    P = adjoint(A, b)
    if not np.any(P):
        raise DegenerateInputError("proxy matrix is zero")
    if norm == "frobenius":
        J1 = _top_indices(np.linalg.norm(P, axis=1), s1)
    elif norm == "spectral":
        count = comb(A.n1, s1)
        if count > budget:
            raise CombinatorialBudgetError(count, budget)
        best = None
        for rows in combinations(range(A.n1), s1):
            val = np.linalg.norm(P[np.asarray(rows), :], 2)
            if best is None or val > best[0]:
                best = (val, rows)
        J1 = np.asarray(best[1], dtype=np.int64)
    else:
        raise ValueError(f"unknown norm {norm!r}")
    restricted = np.zeros_like(P)
    restricted[J1] = P[J1]
    v0 = _leading_right_singular(restricted)
    return InitResult(v0, J1, np.arange(A.n2, dtype=np.int64), f"rowsparse-{norm}")


def init_pf_proxy(A, b):
    """Dense proxy initialization: leading right singular vector of A*(b)."""
    P = adjoint(A, b)
    v0 = _leading_right_singular(P)
    return InitResult(
        v0,
        np.arange(A.n1, dtype=np.int64),
        np.arange(A.n2, dtype=np.int64),
        "proxy",
    )
