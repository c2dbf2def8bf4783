"""Smoke tests for the command-line interface."""

import json

import numpy as np
import pytest

from spf.bench import random_sparse_rank_one
from spf.cli import main
from spf.operators import (
    GaussianSpec,
    apply,
    gaussian_operator,
    save_operator,
)


def _capture_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_theory_subcommand(capsys):
    main(["theory", "--delta", "0.08", "--nu", "0.08", "--s1", "8", "--s2", "8",
          "--D", "0.01", "--sigma2", "1.0"])
    table = _capture_json(capsys)
    assert table["L"] == 3
    assert table["C_htp"] == pytest.approx(2.8547964650483326, rel=1e-9)
    assert table["sin_omega_sup"] == pytest.approx(0.8563365536040113, abs=1e-6)
    assert table["noise_amp_sin_theta"] == pytest.approx(4.3474969912639, rel=1e-6)
    assert table["dof_bound"] == 14
    assert table["measurement_lower_bound"] == pytest.approx(
        32.725646360527215, rel=1e-9
    )
    assert table["feasible"] is True


def test_recover_roundtrip(tmp_path, capsys):
    model = random_sparse_rank_one(16, 8, 3, 4, seed=4)
    X = model.matrix()
    A = gaussian_operator(GaussianSpec(64, 16, 8, seed=4))
    op_path = tmp_path / "op.bin"
    save_operator(A, str(op_path))
    b_path = tmp_path / "b.npy"
    np.save(b_path, apply(A, X))
    out_path = tmp_path / "xhat.npy"
    main([
        "recover", "--operator", str(op_path), "--b", str(b_path),
        "--s1", "3", "--s2", "4", "--out", str(out_path),
    ])
    report = _capture_json(capsys)
    assert report["stop_reason"] == "converged"
    assert report["residual"] < 1e-8
    X_hat = np.load(out_path)
    assert np.linalg.norm(X_hat - X) < 1e-8 * np.linalg.norm(X)


def test_recover_gaussian_spec_and_json_b(tmp_path, capsys):
    A = gaussian_operator(GaussianSpec(32, 8, 4, seed=9))
    model = random_sparse_rank_one(8, 4, 2, 2, seed=9)
    b = apply(A, model.matrix())
    b_path = tmp_path / "b.json"
    b_path.write_text(json.dumps([[z.real, z.imag] for z in b]))
    main([
        "recover", "--operator", "gaussian:32,8,4,9", "--b", str(b_path),
        "--s1", "2", "--s2", "2", "--init", "proxy",
    ])
    report = _capture_json(capsys)
    assert report["m"] == 32 and report["n1"] == 8 and report["n2"] == 4
    assert report["residual"] < 1e-6


def test_phase_transition_subcommand(tmp_path):
    config = {
        "cells": [
            {"n1": 16, "n2": 4, "s1": 2, "s2": 4, "m": 40},
        ],
        "trials": 4,
        "master_seed": 21,
    }
    cfg_path = tmp_path / "grid.json"
    cfg_path.write_text(json.dumps(config))
    out_path = tmp_path / "grid.csv"
    main(["phase-transition", "--config", str(cfg_path), "--out", str(out_path)])
    lines = out_path.read_text().strip().split("\n")
    assert lines[0] == "s1,n2,m,trials,successes,rate"
    assert lines[1].startswith("2,4,40,4,")


def test_noise_sweep_subcommand_with_shorthand(tmp_path, capsys):
    config = {
        "noise": {
            "n1": 16,
            "n2": 4,
            "s1": 2,
            "m": 40,
            "nu_values": [0.2],
        },
        "trials": 3,
        "master_seed": 22,
    }
    cfg_path = tmp_path / "noise.json"
    cfg_path.write_text(json.dumps(config))
    main(["noise-sweep", "--config", str(cfg_path)])
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == "nu,m_ratio,median_snr_db,median_amp"
    assert len(out) == 2


def test_lift_demo(capsys):
    main(["lift-demo", "--n", "16", "--s1", "3", "--s2", "3", "--m", "16",
          "--seed", "1"])
    report = _capture_json(capsys)
    assert report["n"] == 16
    assert report["m"] == 16
    assert "reconstruction_snr_db" in report
    assert isinstance(report["success"], bool)


def test_bad_operator_spec_exits():
    with pytest.raises(SystemExit):
        main(["recover", "--operator", "gaussian:1,2", "--b", "x.npy"])
