"""Command-line interface.

Subcommands: recover, phase-transition, noise-sweep, theory, lift-demo.
Config files are JSON; floats in JSON output are emitted with 17
significant digits via ``repr``-faithful float handling.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import bench, theory
from .bench import (
    AdmmConfig,
    ExperimentSpec,
    GridCell,
    noise_sweep_csv,
    phase_transition_csv,
    random_sparse_rank_one,
    run_trial,
)
from .core import SpfConfig, pf_run, reconstruction_snr, spf_run
from .htp import htp_iteration_budget
from .init import (
    init_optimal,
    init_pf_proxy,
    init_rowsparse,
    init_thresholding,
    support_pair_count,
)
from .operators import (
    GaussianSpec,
    apply as op_apply,
    gaussian_operator,
    lift_bilinear,
    load_operator,
    make_convolution_lifting,
)


def _fmt(value):
    if isinstance(value, float):
        return float(format(value, ".17g"))
    return value


def _emit(obj, stream=None):
    stream = stream if stream is not None else sys.stdout
    json.dump(obj, stream, indent=2, default=_fmt)
    stream.write("\n")


def _load_operator_arg(text):
    if text.startswith("gaussian:"):
        parts = text.split(":", 1)[1].split(",")
        if len(parts) != 4:
            raise SystemExit("expected gaussian:m,n1,n2,seed")
        m, n1, n2, seed = (int(p) for p in parts)
        return gaussian_operator(GaussianSpec(m, n1, n2, seed))
    return load_operator(text)


def _load_vector(path):
    if path.endswith(".npy"):
        return np.load(path)
    with open(path) as fh:
        data = json.load(fh)
    return np.array([complex(re, im) for re, im in data])


def _cmd_recover(args):
    A = _load_operator_arg(args.operator)
    b = _load_vector(args.b)
    s1 = args.s1 if args.s1 is not None else A.n1
    s2 = args.s2 if args.s2 is not None else A.n2
    if args.algo.startswith("bp-"):
        raise SystemExit(
            "bp-* variants need oracle weights; use the library API or run_trial"
        )
    init_fns = {
        "optimal": lambda: init_optimal(A, b, s1, s2),
        "thresh": lambda: init_thresholding(A, b, s1, s2),
        "rowsparse-f": lambda: init_rowsparse(A, b, s1, norm="frobenius"),
        "rowsparse-s": lambda: init_rowsparse(A, b, s1, norm="spectral"),
        "proxy": lambda: init_pf_proxy(A, b),
    }
    if args.init == "optimal":
        count = support_pair_count(A.n1, s1, A.n2, s2)
        print(f"optimal init: searching {count} support pairs", file=sys.stderr)
    v0 = init_fns[args.init]().v0
    cfg = SpfConfig(s1=s1, s2=s2, max_outer=args.max_outer)
    runner = pf_run if args.algo == "pf" else spf_run
    X_hat, trace = runner(A, b, cfg, v0)
    result = {
        "algorithm": args.algo,
        "init": args.init,
        "m": A.m,
        "n1": A.n1,
        "n2": A.n2,
        "s1": s1,
        "s2": s2,
        "outer_iterations": len(trace.rows),
        "stop_reason": trace.stop_reason,
        "residual": trace.rows[-1].residual if trace.rows else math.nan,
    }
    if args.out:
        np.save(args.out, X_hat)
        result["matrix_file"] = args.out
    _emit(result)


def _spec_from_config(path):
    with open(path) as fh:
        cfg = json.load(fh)
    if "cells" in cfg:
        cells = tuple(GridCell(**cell) for cell in cfg["cells"])
    elif "row_sparse" in cfg:
        cells = bench.row_sparse_cells(**cfg["row_sparse"])
    elif "doubly_sparse" in cfg:
        cells = bench.doubly_sparse_cells(**cfg["doubly_sparse"])
    elif "noise" in cfg:
        cells = bench.noise_cells(**cfg["noise"])
    else:
        raise SystemExit("config needs cells / row_sparse / doubly_sparse / noise")
    kwargs = {
        key: cfg[key]
        for key in (
            "trials",
            "algorithm",
            "init",
            "threshold_db",
            "master_seed",
            "max_outer",
        )
        if key in cfg
    }
    if "axes" in cfg:
        kwargs["axes"] = tuple(cfg["axes"])
    if "admm" in cfg:
        kwargs["admm"] = AdmmConfig(**cfg["admm"])
    return ExperimentSpec(cells=cells, **kwargs)


def _cmd_phase_transition(args):
    spec = _spec_from_config(args.config)
    text = phase_transition_csv(spec, workers=args.workers)
    _write_text(text, args.out)


def _cmd_noise_sweep(args):
    spec = _spec_from_config(args.config)
    text = noise_sweep_csv(spec, workers=args.workers)
    _write_text(text, args.out)


def _write_text(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_theory(args):
    consts = theory.htp_constants(args.delta)
    bounds = theory.omega_bounds(args.delta, args.nu)
    table = {
        "delta": consts.delta,
        "rho": consts.rho,
        "tau": consts.tau,
        "rho_prime": consts.rho_prime,
        "tau_prime": consts.tau_prime,
        "C_htp": consts.C_htp,
        "L": consts.L,
        "K": consts.K,
        "omega_inf": bounds.omega_inf,
        "omega_sup": bounds.omega_sup,
        "sin_omega_inf": math.sin(bounds.omega_inf) if bounds.feasible else math.nan,
        "sin_omega_sup": math.sin(bounds.omega_sup) if bounds.feasible else math.nan,
        "feasible": bounds.feasible,
    }
    if bounds.feasible:
        amp = theory.noise_amp_constant(args.delta, args.nu)
        table["noise_amp_sin_theta"] = amp
        table["noise_amp_frobenius"] = amp * theory.frobenius_conversion(args.delta)
    if args.s1 is not None:
        table["htp_budget_s1"] = htp_iteration_budget(args.s1, args.delta)
    if args.s1 is not None and args.s2 is not None:
        table["dof_bound"] = theory.dof_bound(args.s1, args.s2)
        if args.D is not None and args.sigma2 is not None:
            table["measurement_lower_bound"] = theory.measurement_lower_bound(
                args.s1, args.s2, args.D, args.sigma2
            )
    _emit(table)


def _cmd_lift_demo(args):
    problem = make_convolution_lifting(args.n)
    A_full = lift_bilinear(problem)
    m = min(args.m or args.n, args.n)
    from .operators import MeasurementOperator

    A = MeasurementOperator(A_full.matrices[:m])
    model = random_sparse_rank_one(args.n, args.n, args.s1, args.s2, args.seed)
    X = model.matrix()
    b = op_apply(A, X)
    v0 = init_thresholding(A, b, args.s1, args.s2).v0
    cfg = SpfConfig(s1=args.s1, s2=args.s2)
    X_hat, trace = spf_run(A, b, cfg, v0)
    snr = reconstruction_snr(X_hat, X)
    _emit(
        {
            "n": args.n,
            "m": m,
            "s1": args.s1,
            "s2": args.s2,
            "seed": args.seed,
            "outer_iterations": len(trace.rows),
            "stop_reason": trace.stop_reason,
            "reconstruction_snr_db": snr,
            "success": snr >= 50.0,
        }
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spf", description="sparse rank-one matrix recovery toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="recover one matrix from measurements")
    p.add_argument("--operator", required=True, help="file or gaussian:m,n1,n2,seed")
    p.add_argument("--b", required=True, help="measurement vector (.npy or JSON)")
    p.add_argument("--s1", type=int)
    p.add_argument("--s2", type=int)
    p.add_argument(
        "--init",
        default="thresh",
        choices=["optimal", "thresh", "rowsparse-f", "rowsparse-s", "proxy"],
    )
    p.add_argument("--algo", default="spf", choices=["spf", "pf"])
    p.add_argument("--max-outer", type=int, default=50)
    p.add_argument("--out", help="write the recovered matrix to this .npy file")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("phase-transition", help="success-rate grid to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_phase_transition)

    p = sub.add_parser("noise-sweep", help="median SNR / amplification to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_noise_sweep)

    p = sub.add_parser("theory", help="closed-form constants table")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--s1", type=int)
    p.add_argument("--s2", type=int)
    p.add_argument("--D", type=float)
    p.add_argument("--sigma2", type=float)
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("lift-demo", help="blind-deconvolution round trip")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s1", type=int, required=True)
    p.add_argument("--s2", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_lift_demo)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    main()
