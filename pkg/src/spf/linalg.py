"""Complex dense linear-algebra primitives shared by all solvers.

Vectors and matrices are plain complex128 numpy arrays. Helpers validate
finiteness and shapes on entry; all functions are pure.
"""

import numpy as np

from .exceptions import DegenerateInputError

DEFAULT_TOL = 1e-10


def as_cvector(x):
    """Validate and return x as a 1-d complex128 array with finite entries."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError(f"expected a vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector contains NaN or Inf entries")
    return x


def as_cmatrix(A):
    """Validate and return A as a 2-d complex128 array with finite entries."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"matrix shape must be strictly positive, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains NaN or Inf entries")
    return A


def index_set(indices, n):
    """Validate a set of 0-based coordinates within a universe of size n.

    Returns a strictly increasing int64 array. Duplicates or out-of-range
    indices raise ValueError.
    """
    J = np.asarray(sorted(indices), dtype=np.int64)
    if J.size and (J[0] < 0 or J[-1] >= n):
        raise ValueError(f"index out of range for universe size {n}")
    if J.size != np.unique(J).size:
        raise ValueError("duplicate indices")
    return J


def _top_support(x, s):
    """Indices of the s largest-magnitude entries, ties broken by lowest index."""
    mag = np.abs(x)
    # stable sort on (-magnitude) keeps the lowest index first among ties
    order = np.argsort(-mag, kind="stable")
    return np.sort(order[:s])


def hard_threshold(x, s):
    """Best s-sparse approximation: zero all but the s largest magnitudes.

    Equal magnitudes are resolved in favor of the lowest index so results
    are reproducible across platforms. s >= len(x) returns x unchanged.
    """
    x = as_cvector(x)
    if s < 1:
        raise ValueError(f"sparsity level must be >= 1, got {s}")
    if s >= x.size:
        return x.copy()
    out = np.zeros_like(x)
    J = _top_support(x, s)
    out[J] = x[J]
    return out


def sparse_norm(x, s):
    """l2 norm of the best s-sparse approximation of x."""
    x = as_cvector(x)
    if s < 1:
        raise ValueError(f"sparsity level must be >= 1, got {s}")
    if s >= x.size:
        return float(np.linalg.norm(x))
    mag = np.abs(x)
    J = _top_support(x, s)
    return float(np.linalg.norm(mag[J]))


def coord_project(x, J, complement=False):
    """Coordinate projection: zero entries (rows, for matrices) outside J.

    With complement=True, zero the entries inside J instead.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    J = index_set(J, n)
    mask = np.zeros(n, dtype=bool)
    mask[J] = True
    if complement:
        mask = ~mask
    out = np.zeros_like(x)
    out[mask] = x[mask]
    return out


def leading_pair(M, tol=1e-8):
    """Leading singular triple (sigma1, u1, v1) of M.

    u1 and v1 are unit-norm; sigma1 >= 0. Raises DegenerateInputError for an
    all-zero matrix.
    """
    M = as_cmatrix(M)
    if not np.any(M):
        raise DegenerateInputError("leading_pair of an all-zero matrix")
    U, S, Vh = np.linalg.svd(M, full_matrices=False)
    sigma1 = float(S[0])
    u1 = U[:, 0]
    v1 = Vh[0, :].conj()
    resid = np.linalg.norm(M @ v1 - sigma1 * u1)
    if resid > tol * max(np.linalg.norm(M), 1.0):
        raise ArithmeticError(f"SVD residual {resid:.3e} exceeds tolerance")
    return sigma1, u1, v1


def subspace_sin(a, b):
    """Sine of the principal angle between span(a) and span(b).

    Invariant under nonzero complex scaling of either argument. Raises
    DegenerateInputError for zero vectors.
    """
    a = as_cvector(a)
    b = as_cvector(b)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DegenerateInputError("subspace angle undefined for zero vector")
    c = abs(np.vdot(a, b)) / (na * nb)
    return float(np.sqrt(max(0.0, 1.0 - min(c, 1.0) ** 2)))
