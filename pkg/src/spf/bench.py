"""Signal generation and the Monte-Carlo experiment harness.

Seeds derive from a master seed through ``numpy.random.SeedSequence`` spawn
keys (master -> cell -> trial -> stream), so any subset of a grid can be
re-run in isolation and results are byte-identical regardless of worker
count. Failed or degenerate trials are recorded, never resampled.
"""

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .baselines import AdmmConfig, BpProblem, bp_solve
from .core import SpfConfig, pf_run, reconstruction_snr, noise_amplification, spf_run
from .exceptions import CombinatorialBudgetError, DegenerateIterateError
from .init import init_optimal, init_pf_proxy, init_rowsparse, init_thresholding
from .operators import GaussianSpec, apply as op_apply, gaussian_operator

ALGORITHMS = ("spf", "pf", "bp-lr", "bp-rs", "bp-rslr", "bp-ds", "bp-dslr")
INIT_METHODS = ("optimal", "thresh", "rowsparse-f", "rowsparse-s", "proxy")

_F17 = lambda x: format(float(x), ".17g")


@dataclass(frozen=True)
class SparseRankOneModel:
    """Ground truth lam * u v^* with unit-norm sparse factors."""

    lam: float
    u: np.ndarray
    v: np.ndarray
    s1: int
    s2: int

    def matrix(self):
        return self.lam * np.outer(self.u, self.v.conj())


@dataclass(frozen=True)
class GridCell:
    n1: int
    n2: int
    s1: int
    s2: int
    m: int
    nu: float = 0.0


@dataclass(frozen=True)
class ExperimentSpec:
    """Monte-Carlo grid: one GridCell per (axis1, axis2) coordinate."""

    cells: tuple
    axes: tuple = ("s1", "n2")
    trials: int = 100
    algorithm: str = "spf"
    init: str = "thresh"
    threshold_db: float = 50.0
    master_seed: int = 0
    max_outer: int = 50
    admm: AdmmConfig = field(default_factory=AdmmConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.threshold_db <= 0:
            raise ValueError("threshold must be positive")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.init not in INIT_METHODS:
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class TrialResult:
    cell: GridCell
    trial: int
    snr_db: float
    amplification: float
    outer_iterations: int
    wall_time: float
    stop_reason: str

    @property
    def success(self):
        return self.snr_db >= 50.0


def _rng(master_seed, *key):
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=key))
    )


def _seed_int(master_seed, *key):
    return int(
        np.random.SeedSequence(master_seed, spawn_key=key).generate_state(
            1, np.uint64
        )[0]
    )


def random_sparse_rank_one(n1, n2, s1, s2, seed):
    """Draw a unit-norm sparse rank-one model.

    Supports are uniform over size-s subsets; nonzeros are uniform on the
    complex sphere of the support; lam = 1.
    """
    if not (1 <= s1 <= n1 and 1 <= s2 <= n2):
        raise ValueError(f"invalid sparsities ({s1}, {s2}) for ({n1}, {n2})")
    rng = _rng(seed, 0) if isinstance(seed, int) else np.random.Generator(
        np.random.Philox(seed)
    )

    def sparse_unit(n, s):
        support = np.sort(rng.choice(n, size=s, replace=False))
        x = np.zeros(n, dtype=np.complex128)
        g = rng.normal(size=s) + 1j * rng.normal(size=s)
        while np.linalg.norm(g) == 0:
            g = rng.normal(size=s) + 1j * rng.normal(size=s)
        x[support] = g / np.linalg.norm(g)
        return x

    return SparseRankOneModel(1.0, sparse_unit(n1, s1), sparse_unit(n2, s2), s1, s2)


def _initialize(method, A, b, s1, s2):
    if method == "optimal":
        return init_optimal(A, b, s1, s2)
    if method == "thresh":
        return init_thresholding(A, b, s1, s2)
    if method == "rowsparse-f":
        return init_rowsparse(A, b, s1, norm="frobenius")
    if method == "rowsparse-s":
        return init_rowsparse(A, b, s1, norm="spectral")
    if method == "proxy":
        return init_pf_proxy(A, b)
    raise ValueError(f"unknown init {method!r}")


def run_trial(
    A,
    model,
    nu,
    algorithm,
    init,
    seed,
    max_outer=50,
    admm=AdmmConfig(),
    cell=None,
    trial_index=0,
):
    """Run one recovery trial: draw noise at exact level nu, initialize,
    solve, and score. A degenerate SPF iterate is retried once from a
    perturbed v0; a second failure is recorded, not raised."""
    X = model.matrix()
    clean = op_apply(A, X)
    b = clean.copy()
    if nu > 0:
        rng = _rng(seed, 2)
        g = rng.normal(size=A.m) + 1j * rng.normal(size=A.m)
        b = clean + nu * np.linalg.norm(clean) * g / np.linalg.norm(g)
    if cell is None:
        cell = GridCell(A.n1, A.n2, model.s1, model.s2, A.m, nu)

    start = time.perf_counter()
    outer = 0
    stop = "ok"
    X_hat = np.zeros_like(X)
    if algorithm.startswith("bp-"):
        variant = algorithm[3:].upper()
        problem = BpProblem(
            A,
            b,
            weight_row=float(np.linalg.norm(X, axis=1).sum()),
            weight_col=float(np.linalg.norm(X, axis=0).sum()),
            weight_nuc=float(np.linalg.svd(X, compute_uv=False).sum()),
        )
        sol = bp_solve(problem, variant, admm)
        X_hat = sol.Z
        outer = sol.iterations
        stop = "converged" if sol.converged else "not-converged"
    else:
        cfg = SpfConfig(s1=model.s1, s2=model.s2, max_outer=max_outer)
        if algorithm == "pf":
            cfg = SpfConfig(s1=A.n1, s2=A.n2, max_outer=max_outer)
        try:
            v0 = _initialize(init, A, b, cfg.s1, cfg.s2).v0
        except (CombinatorialBudgetError, ValueError):
            raise
        runner = pf_run if algorithm == "pf" else spf_run
        try:
            X_hat, trace = runner(A, b, cfg, v0)
            outer = len(trace.rows)
            stop = trace.stop_reason
        except DegenerateIterateError:
            rng = _rng(seed, 3)
            bump = rng.normal(size=A.n2) + 1j * rng.normal(size=A.n2)
            v0_retry = v0 + 1e-3 * np.linalg.norm(v0) * bump / np.linalg.norm(bump)
            try:
                X_hat, trace = runner(A, b, cfg, v0_retry)
                outer = len(trace.rows)
                stop = trace.stop_reason
            except DegenerateIterateError as exc:
                outer = len(exc.trace.rows) if exc.trace else 0
                stop = "degenerate"
    wall = time.perf_counter() - start

    snr = reconstruction_snr(X_hat, X)
    amp = noise_amplification(X_hat, X, nu) if nu > 0 else float("-inf")
    return TrialResult(cell, trial_index, snr, amp, outer, wall, stop)


def _trial_task(args):
    (spec, cell_idx, trial_idx) = args
    cell = spec.cells[cell_idx]
    op_seed = _seed_int(spec.master_seed, cell_idx, trial_idx, 0)
    A = gaussian_operator(GaussianSpec(cell.m, cell.n1, cell.n2, op_seed))
    model = random_sparse_rank_one(
        cell.n1,
        cell.n2,
        cell.s1,
        cell.s2,
        np.random.SeedSequence(spec.master_seed, spawn_key=(cell_idx, trial_idx, 1)),
    )
    noise_seed = _seed_int(spec.master_seed, cell_idx, trial_idx)
    return run_trial(
        A,
        model,
        cell.nu,
        spec.algorithm,
        spec.init,
        noise_seed,
        max_outer=spec.max_outer,
        admm=spec.admm,
        cell=cell,
        trial_index=trial_idx,
    )


def _run_grid(spec, workers=1):
    tasks = [
        (spec, ci, ti)
        for ci in range(len(spec.cells))
        for ti in range(spec.trials)
    ]
    if workers <= 1:
        results = [_trial_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_task, tasks, chunksize=4))
    per_cell = [[] for _ in spec.cells]
    for (_, ci, _), res in zip(tasks, results):
        per_cell[ci].append(res)
    return per_cell


def phase_transition(spec, workers=1):
    """Success fraction per cell. Deterministic in spec.master_seed and
    independent of the worker count."""
    per_cell = _run_grid(spec, workers)
    rows = []
    for cell, results in zip(spec.cells, per_cell):
        successes = sum(1 for r in results if r.snr_db >= spec.threshold_db)
        rows.append(
            {
                spec.axes[0]: getattr(cell, spec.axes[0]),
                spec.axes[1]: getattr(cell, spec.axes[1]),
                "m": cell.m,
                "trials": spec.trials,
                "successes": successes,
                "rate": successes / spec.trials,
            }
        )
    return rows


def phase_transition_csv(spec, workers=1):
    rows = phase_transition(spec, workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([spec.axes[0], spec.axes[1], "m", "trials", "successes", "rate"])
    for row in rows:
        writer.writerow(
            [
                row[spec.axes[0]],
                row[spec.axes[1]],
                row["m"],
                row["trials"],
                row["successes"],
                _F17(row["rate"]),
            ]
        )
    return buf.getvalue()


def noise_sweep(spec, workers=1):
    """Median reconstruction SNR and noise amplification per cell."""
    per_cell = _run_grid(spec, workers)
    rows = []
    for cell, results in zip(spec.cells, per_cell):
        snrs = sorted(r.snr_db for r in results)
        amps = sorted(r.amplification for r in results)
        rows.append(
            {
                "nu": cell.nu,
                "m_ratio": cell.m / (cell.s1 + cell.n2),
                "median_snr_db": _median(snrs),
                "median_amp": _median(amps),
            }
        )
    return rows


def noise_sweep_csv(spec, workers=1):
    rows = noise_sweep(spec, workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["nu", "m_ratio", "median_snr_db", "median_amp"])
    for row in rows:
        writer.writerow(
            [
                _F17(row["nu"]),
                _F17(row["m_ratio"]),
                _F17(row["median_snr_db"]),
                _F17(row["median_amp"]),
            ]
        )
    return buf.getvalue()


def _median(sorted_vals):
    n = len(sorted_vals)
    mid = n // 2
    if n % 2:
        return float(sorted_vals[mid])
    return 0.5 * (float(sorted_vals[mid - 1]) + float(sorted_vals[mid]))


def row_sparse_cells(n1, n2_values, s_values, m):
    """Row-sparse grid (s2 = n2) at fixed m; axes (s1, n2)."""
    return tuple(
        GridCell(n1, n2, s, n2, m) for n2 in n2_values for s in s_values
    )


def doubly_sparse_cells(n, s_values, m_values):
    """Doubly sparse (s, s) grid on n x n matrices; axes (s1, m)."""
    return tuple(
        GridCell(n, n, s, s, m) for m in m_values for s in s_values
    )


def noise_cells(n1, n2, s1, m, nu_values):
    """Noise sweep cells at fixed geometry; axes (nu, m)."""
    return tuple(GridCell(n1, n2, s1, n2, m, nu) for nu in nu_values)
