import json
import os
import subprocess

import numpy as np
import pytest

import slpg


def test_geometry_roundtrip():
    x = slpg.random_orthonormal(10, 3, 1)
    assert x.shape == (10, 3)
    assert slpg.feasibility(x).fro_violation < 1e-13
    np.testing.assert_allclose(slpg.normal_step(x), x, atol=1e-14)
    np.testing.assert_allclose(slpg.polar_project(2.0 * np.eye(2)), np.eye(2), atol=1e-15)
    np.testing.assert_array_equal(slpg.sym(np.array([[1.0, 2.0], [0.0, 3.0]])),
                                  np.array([[1.0, 1.0], [1.0, 3.0]]))


def test_prox_examples():
    d = slpg.prox(slpg.EntrywiseL1(0.2), np.zeros((1, 1)), np.array([[0.5]]), 1.0)
    assert d[0, 0] == pytest.approx(0.3)
    d = slpg.prox(slpg.RowwiseL21(np.array([1.0])), np.zeros((1, 2)), np.array([[0.6, 0.8]]), 0.5)
    np.testing.assert_allclose(d, [[0.3, 0.4]])


def test_errors_are_python_exceptions():
    with pytest.raises(slpg.DimensionError):
        slpg.sym(np.zeros((2, 3)))
    with pytest.raises(slpg.ParameterError):
        slpg.prox(slpg.ZeroRegularizer(), np.zeros((2, 2)), np.zeros((2, 2)), 0.0)
    with pytest.raises(slpg.SingularityError):
        slpg.polar_project(np.zeros((3, 2)))
    assert issubclass(slpg.DimensionError, slpg.Error)


def test_solve_sparse_pca():
    inst = slpg.make_instance(slpg.InstanceSpec("SparsePCA", n=60, p=3, gamma=0.05, seed=2))
    res = slpg.slpg_solve(inst.objective, inst.regularizer, inst.x0, slpg.SolveOptions())
    assert res.terminated == slpg.Termination.Converged
    assert res.feasibility_after_post <= 1e-12
    assert len(res.trace) == res.iterations + 1
    assert res.trace[-1].substationarity <= 1e-4
    assert slpg.trace_csv(res.trace).startswith("k,eta,fval,")


def test_solve_smooth_matches_eigenvalues():
    inst = slpg.make_instance(slpg.InstanceSpec("PCA", n=40, p=2, seed=3, random_init=True))
    opts = slpg.SolveOptions()
    opts.tol = 1e-8
    res = slpg.slpg_solve(inst.objective, inst.regularizer, inst.x0, opts)
    top = np.sort(np.linalg.eigvalsh(inst.L))[-2:]
    assert res.fval_after_post == pytest.approx(-0.5 * top.sum(), abs=1e-8)


def test_cli_commands(tmp_path):
    cfg = {
        "instance": {"kind": "SparsePCA", "n": 40, "p": 2, "seed": 1},
        "outputs": {"trace_path": str(tmp_path / "t.csv"), "summary_path": str(tmp_path / "s.json")},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, err = slpg.cmd_solve(str(path))
    assert code == 0, err
    summary = json.loads((tmp_path / "s.json").read_text())
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert len(rows) == summary["iterations"] + 2

    code, out, err = slpg.cmd_multistart(str(path), 3)
    assert code in (0, 2), err
    assert out.startswith("bin_value,count")

    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, out, err = slpg.cmd_solve(str(bad))
    assert code == 1 and err


def test_bench_executable(tmp_path):
    exe = os.environ.get("SLPG_BENCH")
    if not exe:
        pytest.skip("slpg_bench location not provided")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"instance": {"kind": "PCA", "n": 20, "p": 2}}))
    proc = subprocess.run([exe, "multistart", str(path), "--runs", "2"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines()[1].endswith(",2")
