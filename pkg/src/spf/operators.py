"""Linear sensing operators for rank-one matrix recovery.

A measurement operator is a stack of m complex n1 x n2 matrices (M_l); it
acts on a matrix Z by [A(Z)]_l = <M_l, Z> = trace(M_l^* Z) and its adjoint
maps w to sum_l w_l M_l. The derived per-factor sensing matrices F(y) and
G(x) satisfy the sesquilinearity identity

    A(x y^*) = F(y) x = conj(G(x) y).

Random ensembles use the counter-based Philox generator keyed by a 64-bit
seed, so repeated construction is bit-identical and parallel streams can be
split deterministically via ``numpy.random.SeedSequence`` spawn keys.
Complex Gaussian convention: CN(0, s2) has independent real and imaginary
parts of variance s2/2 each.
"""

import struct
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .linalg import as_cmatrix, as_cvector

#: Hard cap on m * n1 * n2 entries for randomly generated dense operators.
MEMORY_BUDGET_ENTRIES = 1 << 26

_MAGIC = b"SPFOPER\x00"
_VERSION = 1


@runtime_checkable
class SensingOperator(Protocol):
    """Matrix-free sensing interface. Only the dense stack ships."""

    m: int
    n1: int
    n2: int

    def __call__(self, Z): ...

    def adjoint(self, w): ...


@dataclass(frozen=True)
class MeasurementOperator:
    """Dense stack of m sensing matrices of shape n1 x n2."""

    matrices: np.ndarray
    seed: int = 0

    def __post_init__(self):
        M = np.asarray(self.matrices, dtype=np.complex128)
        if M.ndim != 3 or M.shape[0] < 1:
            raise ValueError(f"expected an (m, n1, n2) stack, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ValueError("operator contains NaN or Inf entries")
        M.setflags(write=False)
        object.__setattr__(self, "matrices", M)

    @property
    def m(self):
        return self.matrices.shape[0]

    @property
    def n1(self):
        return self.matrices.shape[1]

    @property
    def n2(self):
        return self.matrices.shape[2]

    def __call__(self, Z):
        return apply(self, Z)

    def adjoint(self, w):
        return adjoint(self, w)


@dataclass(frozen=True)
class GaussianSpec:
    """Parameters of an i.i.d. CN(0, 1/m) measurement ensemble."""

    m: int
    n1: int
    n2: int
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n1, self.n2) < 1:
            raise ValueError("m, n1, n2 must be positive")
        if self.m * self.n1 * self.n2 > MEMORY_BUDGET_ENTRIES:
            raise MemoryError(
                f"operator with {self.m * self.n1 * self.n2} entries exceeds "
                f"the budget of {MEMORY_BUDGET_ENTRIES}"
            )


@dataclass(frozen=True)
class BilinearProblem:
    """Coefficient tensor of m bilinear forms: entry [l, j, k] = f_l(xi_j, zeta_k)."""

    coefficients: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coefficients, dtype=np.complex128)
        if C.ndim != 3:
            raise ValueError(f"expected an (m, n1, n2) tensor, got {C.shape}")
        if not np.all(np.isfinite(C)):
            raise ValueError("coefficient tensor contains NaN or Inf entries")
        C.setflags(write=False)
        object.__setattr__(self, "coefficients", C)


def apply(A, Z):
    """Evaluate A(Z): entry l is <M_l, Z> = trace(M_l^* Z)."""
    Z = as_cmatrix(Z)
    if Z.shape != (A.n1, A.n2):
        raise ValueError(f"Z has shape {Z.shape}, operator expects {(A.n1, A.n2)}")
    return np.tensordot(A.matrices.conj(), Z, axes=([1, 2], [0, 1]))


def adjoint(A, w):
    """Evaluate A*(w) = sum_l w_l M_l."""
    w = as_cvector(w)
    if w.size != A.m:
        raise ValueError(f"w has length {w.size}, operator expects {A.m}")
    return np.tensordot(w, A.matrices, axes=(0, 0))


def build_F(A, y):
    """Sensing matrix F(y) of shape m x n1 with row l equal to y^* M_l^*.

    Satisfies A(x y^*) = F(y) x; antilinear in y.
    """
    y = as_cvector(y)
    if y.size != A.n2:
        raise ValueError(f"y has length {y.size}, operator expects {A.n2}")
    return np.tensordot(A.matrices, y, axes=(2, 0)).conj()


def build_G(A, x):
    """Sensing matrix G(x) of shape m x n2 with row l equal to x^* M_l.

    Satisfies A(x y^*) = conj(G(x) y); antilinear in x.
    """
    x = as_cvector(x)
    if x.size != A.n1:
        raise ValueError(f"x has length {x.size}, operator expects {A.n1}")
    return np.tensordot(x.conj(), A.matrices, axes=(0, 1))


def gaussian_operator(spec):
    """Draw a dense operator with i.i.d. CN(0, 1/m) entries.

    Deterministic in spec.seed (Philox counter-based stream).
    """
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    scale = np.sqrt(1.0 / (2.0 * spec.m))
    shape = (spec.m, spec.n1, spec.n2)
    M = rng.normal(0.0, scale, shape) + 1j * rng.normal(0.0, scale, shape)
    return MeasurementOperator(M, seed=spec.seed)


def lift_bilinear(problem):
    """Lift a bilinear system to a linear operator on rank-one matrices.

    Stores M_l = conj(f_l) entrywise so that apply(A, u v^*)_l equals
    sum_{j,k} u_j conj(v_k) f_l(xi_j, zeta_k).
    """
    return MeasurementOperator(problem.coefficients.conj())


def make_convolution_lifting(n):
    """Bilinear forms of length-n circular convolution over standard bases.

    The lifted operator satisfies apply(A, u v^*) = circular conv of u and
    conj(v): coefficient [l, j, k] is 1 iff (j + k) mod n == l.
    """
    if n < 2:
        raise ValueError(f"convolution length must be >= 2, got {n}")
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    C = np.zeros((n, n, n), dtype=np.complex128)
    ell = (j + k) % n
    C[ell, j, k] = 1.0
    return BilinearProblem(C)


def save_operator(A, path):
    """Serialize an operator to a little-endian binary container.

    Layout: magic(8) | version u32 | m u32 | n1 u32 | n2 u32 | seed u64 |
    interleaved float64 (re, im) in C order.
    """
    header = _MAGIC + struct.pack(
        "<IIIIQ", _VERSION, A.m, A.n1, A.n2, A.seed & 0xFFFFFFFFFFFFFFFF
    )
    data = np.ascontiguousarray(A.matrices).view(np.float64)
    if data.dtype.byteorder == ">":
        data = data.astype("<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def load_operator(path):
    """Read an operator written by save_operator."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _MAGIC:
            raise ValueError(f"not an operator file (bad magic {magic!r})")
        version, m, n1, n2, seed = struct.unpack("<IIIIQ", fh.read(24))
        if version != _VERSION:
            raise ValueError(f"unsupported container version {version}")
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if raw.size != 2 * m * n1 * n2:
        raise ValueError("truncated operator payload")
    M = raw.astype(np.float64).view(np.complex128).reshape(m, n1, n2)
    return MeasurementOperator(M, seed=seed)
