"""Closed-form constants and bounds for the recovery guarantees.

All logarithms are natural. The contraction constants for hard thresholding
pursuit require delta < 1/sqrt(3) so that the linear rate rho is below one.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import operators

DELTA_MAX = 1.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class TheoryConstants:
    """Contraction and amplification constants of HTP at a given RIP level."""

    delta: float
    rho: float
    tau: float
    rho_prime: float
    tau_prime: float
    C_htp: float
    L: int
    K: float


@dataclass(frozen=True)
class OmegaBounds:
    """Fixed points of the alternating-contraction map on [0, pi/2).

    Iterates started below omega_sup converge below omega_inf. feasible is
    False when the map has no fixed point (the basin is empty).
    """

    omega_inf: float
    omega_sup: float
    feasible: bool


def _check_delta(delta):
    if not 0.0 < delta < DELTA_MAX:
        raise ValueError(
            f"delta must lie in (0, 1/sqrt(3)) for contraction, got {delta}"
        )


def htp_constants(delta):
    """Evaluate the HTP contraction constants at RIP level delta.

    rho  = sqrt(2 delta^2 / (1 - delta^2))
    tau  = sqrt(2 / (1 - delta^2)) + 1 / (1 - delta)
    rho' = 1 / sqrt(1 - delta^2)
    tau' = 1 / (1 - delta)
    L    = ceil(ln(100 (2 rho' - rho)) / ln(1/rho))
    K    = ln(1 + 2 (rho' + (tau'/tau)(1 - rho)/2)) / ln(2 / (1 + rho))
    C    = 1.01 tau / (1 - rho)
    """
    _check_delta(delta)
    d2 = delta * delta
    rho = math.sqrt(2.0 * d2 / (1.0 - d2))
    tau = math.sqrt(2.0 / (1.0 - d2)) + 1.0 / (1.0 - delta)
    rho_prime = 1.0 / math.sqrt(1.0 - d2)
    tau_prime = 1.0 / (1.0 - delta)
    L = math.ceil(math.log(100.0 * (2.0 * rho_prime - rho)) / math.log(1.0 / rho))
    K = math.log(
        1.0 + 2.0 * (rho_prime + (tau_prime / tau) * (1.0 - rho) / 2.0)
    ) / math.log(2.0 / (1.0 + rho))
    C = 1.01 * tau / (1.0 - rho)
    return TheoryConstants(delta, rho, tau, rho_prime, tau_prime, C, L, K)


def _contraction_map(delta, nu):
    C = htp_constants(delta).C_htp

    def f(w):
        arg = C * (delta * math.tan(w) + (1.0 + delta) * nu / math.cos(w))
        if arg >= 1.0:
            return math.pi / 2.0
        return math.asin(arg)

    return f


def omega_bounds(delta, nu, samples=10000, tol=1e-10):
    """Locate the fixed points of w -> asin(C [delta tan w + (1+delta) nu sec w]).

    The map is convex and increasing on [0, pi/2), so it has at most two
    fixed points; they are bracketed by a uniform scan of w - f(w) and
    refined by bisection. nu = 0 always yields omega_inf = 0.
    """
    _check_delta(delta)
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    f = _contraction_map(delta, nu)
    g = lambda w: w - f(w)
    upper = math.pi / 2.0 - 1e-9
    grid = np.linspace(0.0, upper, samples)
    vals = np.array([g(w) for w in grid])
    roots = []
    if vals[0] == 0.0:
        roots.append(0.0)
    sign = np.sign(vals)
    for i in np.flatnonzero(np.diff(sign) != 0):
        roots.append(brentq(g, grid[i], grid[i + 1], xtol=tol))
    # touching fixed point (double root) would show as a nonnegative minimum
    if not roots:
        return OmegaBounds(math.nan, math.nan, False)
    return OmegaBounds(min(roots), max(roots), True)


def noise_amp_constant(delta0, nu0):
    """Worst-case amplification of measurement noise into sin(theta).

    Evaluates C1 (1 + delta0) / (cos(w) - C1 delta0) at w = omega_inf of
    (delta0, nu0), with C1 the HTP constant at delta0. Equals
    sin(omega_inf)/nu0, the slope of the residual-angle envelope.
    """
    bounds = omega_bounds(delta0, nu0)
    if not bounds.feasible:
        raise ValueError(
            f"contraction infeasible at delta0={delta0}, nu0={nu0}"
        )
    C1 = htp_constants(delta0).C_htp
    denom = math.cos(bounds.omega_inf) - C1 * delta0
    if denom <= 0:
        raise ValueError("amplification constant undefined (denominator <= 0)")
    return C1 * (1.0 + delta0) / denom


def frobenius_conversion(delta):
    """Factor sqrt((1+delta)/(1-delta)) mapping sin(theta) to relative
    Frobenius error."""
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    return math.sqrt((1.0 + delta) / (1.0 - delta))


def measurement_lower_bound(s1, s2, D, sigma2):
    """Minimum measurement count for mean-square distortion D at noise
    variance sigma2:

        ((s1 + s2 - 2) log(1/(12 D)) - 7) / log(1 + 1/sigma2).
    """
    if not 0.0 < D < 1.0 / 12.0:
        raise ValueError(f"D must lie in (0, 1/12), got {D}")
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    return ((s1 + s2 - 2) * math.log(1.0 / (12.0 * D)) - 7.0) / math.log(
        1.0 + 1.0 / sigma2
    )


def dof_bound(s1, s2):
    """Degrees-of-freedom limit for stable recovery: s1 + s2 - 2."""
    return s1 + s2 - 2


def rate_distortion_lower(n, D):
    """Rate-distortion lower bound (n - 1) log+(1/(6 D)) - 3.5 for a
    one-dimensional uniform random subspace of C^n."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 < D < 2.0:
        raise ValueError(f"D must lie in (0, 2), got {D}")
    return (n - 1) * max(math.log(1.0 / (6.0 * D)), 0.0) - 3.5


def rip_sample_count(s1, s2, n1, n2, c1=1.0):
    """Heuristic sample-size suggestion m >= c1 (s1 + s2) log(max(n1, n2)).

    The universal constant c1 is a user input; it is not pinned by theory.
    """
    return math.ceil(c1 * (s1 + s2) * math.log(max(n1, n2)))


def _random_sparse_low_rank(rng, n1, n2, r, s1, s2):
    """Random rank-<=r matrix with <= s1 nonzero rows, <= s2 nonzero
    columns, unit Frobenius norm."""
    rows = rng.choice(n1, size=s1, replace=False)
    cols = rng.choice(n2, size=s2, replace=False)
    U = np.zeros((n1, r), dtype=np.complex128)
    V = np.zeros((n2, r), dtype=np.complex128)
    U[rows] = rng.normal(size=(s1, r)) + 1j * rng.normal(size=(s1, r))
    V[cols] = rng.normal(size=(s2, r)) + 1j * rng.normal(size=(s2, r))
    Z = U @ V.conj().T
    nrm = np.linalg.norm(Z)
    if nrm == 0:
        Z[rows[0], cols[0]] = 1.0
        nrm = 1.0
    return Z / nrm


def empirical_rip(A, r, s1, s2, n_samples, seed=0):
    """Monte-Carlo lower estimate of the restricted isometry constant.

    Maximizes |  ||A(Z)||_2^2 - 1 | over random unit-Frobenius rank-<=r
    matrices with s1-sparse rows and s2-sparse columns. Per-sample streams
    are derived deterministically from seed, so the estimate is a running
    max that is reproducible and non-decreasing in n_samples.
    """
    if r not in (1, 2):
        raise ValueError(f"rank must be 1 or 2, got {r}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    worst = 0.0
    for i in range(n_samples):
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(seed, spawn_key=(i,)))
        )
        Z = _random_sparse_low_rank(rng, A.n1, A.n2, r, s1, s2)
        worst = max(worst, abs(float(np.linalg.norm(operators.apply(A, Z))) ** 2 - 1.0))
    return worst


# re-exported for CLI table assembly
__all__ = [
    "TheoryConstants",
    "OmegaBounds",
    "htp_constants",
    "omega_bounds",
    "noise_amp_constant",
    "frobenius_conversion",
    "measurement_lower_bound",
    "dof_bound",
    "rate_distortion_lower",
    "rip_sample_count",
    "empirical_rip",
    "DELTA_MAX",
]
