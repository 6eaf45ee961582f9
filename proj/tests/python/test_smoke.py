"""Smoke tests for the python bindings (module built by CMake)."""

import numpy as np
import pytest

rssm = pytest.importorskip("rssm")


def test_geometry_kernels():
    X = rssm.random_stiefel(8, 3, seed=4)
    assert rssm.feasibility_error(X) <= 1e-10

    A = np.random.default_rng(0).normal(size=(8, 3))
    P = rssm.polar_project(A)
    assert np.linalg.norm(P.T @ P - np.eye(3)) <= 1e-10

    xi = rssm.tangent_project(X, A)
    assert np.linalg.norm((X.T @ xi) + (X.T @ xi).T) / 2 <= 1e-9

    R = rssm.retract(X, xi)
    assert rssm.feasibility_error(R) <= 1e-10


def test_norms_match_numpy():
    A = np.random.default_rng(1).normal(size=(6, 4))
    sv = np.linalg.svd(A, compute_uv=False)
    assert rssm.nuclear_norm(A) == pytest.approx(sv.sum(), rel=1e-9)
    assert rssm.operator_norm(A) == pytest.approx(sv.max(), rel=1e-9)


def test_singular_input_raises():
    with pytest.raises(ArithmeticError):
        rssm.inv_sqrt(np.diag([1.0, 1e-15]))


def test_partition():
    blocks = rssm.make_uniform_partition(5, 2)
    assert blocks == [[0, 1, 2], [3, 4]]


def test_rssm_run_is_deterministic_and_decreases_error():
    inst = rssm.gen_rsr(30, 5, 150, 250, seed=7)
    X0 = rssm.rsr_init(inst)
    kwargs = dict(ell=3, schedule="logdamped", c=0.9, a=2.0, rho=0.991,
                  iters=4000, seed=11, stride=500)
    tr1 = rssm.run_rssm(inst, X0, **kwargs)
    tr2 = rssm.run_rssm(inst, X0, **kwargs)
    assert tr1["f"] == tr2["f"]
    assert tr1["err"][-1] < tr1["err"][0]
    assert tr1["max_feasibility_error"] <= 1e-8


def test_rsm_baseline_runs():
    inst = rssm.gen_odl(12, 100, 0.3, seed=3)
    X0 = rssm.random_stiefel(12, 12, seed=5)
    tr = rssm.run_rsm(inst, X0, schedule="logdamped", c=1e-2, iters=300,
                      stride=50)
    assert len(tr["iter"]) >= 2
    assert tr["flops"][-1] > 0


def test_instance_roundtrip(tmp_path):
    inst = rssm.gen_rsr(10, 2, 20, 30, seed=2)
    path = str(tmp_path / "inst.bin")
    rssm.save_rsr(inst, path)
    back = rssm.load_rsr(path)
    assert np.array_equal(back.data, inst.data)
    assert np.array_equal(back.basis, inst.basis)


def test_step_size_formula():
    got = rssm.step_size("const", 0.9, ell=3, horizon=99, k=0)
    assert got == pytest.approx(0.9 / np.sqrt(300.0), rel=1e-14)
