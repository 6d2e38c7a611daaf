import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from rabi_vqe.hilbert import (
    DOWN,
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    UP,
    DimensionError,
    HilbertConfig,
    NotHermitianError,
    apply_diag_exp,
    basis_state,
    build_boson_ops,
    check_density_matrix,
    eigh,
    partial_trace_spin,
    purity,
    tensor,
)


def test_config_dimensions():
    cfg = HilbertConfig(60)
    assert cfg.boson_dim == 61
    assert cfg.dim == 122
    with pytest.raises(ValueError):
        HilbertConfig(0)


def test_ladder_truncation_n2():
    ops = build_boson_ops(HilbertConfig(2))
    ket2 = np.array([0, 0, 1.0])
    np.testing.assert_allclose(ops.a @ ket2, [0, math.sqrt(2), 0])
    np.testing.assert_allclose(ops.a_dag @ ket2, 0)
    np.testing.assert_allclose(ops.a_dag, ops.a.conj().T)
    np.testing.assert_allclose(ops.n_op, np.diag([0, 1, 2]))


def test_vacuum_q_squared():
    ops = build_boson_ops(HilbertConfig(2))
    assert (ops.Q @ ops.Q)[0, 0].real == pytest.approx(0.5)


def test_canonical_commutator_except_cutoff_corner():
    N = 60
    ops = build_boson_ops(HilbertConfig(N))
    comm = ops.Q @ ops.P - ops.P @ ops.Q
    expected = 1j * np.eye(N + 1)
    # hard cutoff: [a, a^dag] has -N in its last diagonal entry
    expected[N, N] = -1j * N
    np.testing.assert_allclose(comm, expected, atol=1e-12)


def test_tensor_conventions():
    cfg = HilbertConfig(4)
    ops = build_boson_ops(cfg)
    eye = np.eye(cfg.boson_dim)
    zero_down = basis_state(cfg, 0, DOWN)
    np.testing.assert_allclose(tensor(eye, SIGMA_Z) @ zero_down, -zero_down)
    three_up = basis_state(cfg, 3, UP)
    np.testing.assert_allclose(tensor(ops.n_op, IDENTITY_2) @ three_up, 3 * three_up)
    np.testing.assert_allclose(tensor(ops.a, SIGMA_X) @ basis_state(cfg, 1, DOWN), basis_state(cfg, 0, UP))


def test_tensor_rejects_bad_spin_dim():
    with pytest.raises(DimensionError):
        tensor(np.eye(3), np.eye(3))


def test_eigh_sigma_x():
    evals, evecs = eigh(SIGMA_X)
    np.testing.assert_allclose(evals, [-1, 1])
    minus = np.array([1, -1]) / math.sqrt(2)
    assert abs(abs(evecs[:, 0] @ minus) - 1) < 1e-12


def test_eigh_number_operator():
    evals, _ = eigh(build_boson_ops(HilbertConfig(4)).n_op)
    np.testing.assert_allclose(evals, [0, 1, 2, 3, 4], atol=1e-14)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigh_rabi_matches_effective_ground_energy():
    from rabi_vqe.model import RabiParams, build_hamiltonians

    params = RabiParams(omega0=0.1, Omega=6.4, lam=0.24)
    assert params.g == pytest.approx(0.6)
    evals, _ = eigh(build_hamiltonians(params, HilbertConfig(60)).H_full)
    analytic = 0.05 * (math.sqrt(1 - 0.36) - 1) - 3.2
    assert analytic == pytest.approx(-3.21)
    assert abs(evals[0] - analytic) < params.lam**2 / params.Omega


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=128), st.integers(min_value=0, max_value=2**31))
def test_eigh_round_trip_random(dim, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    A = A + A.conj().T
    evals, V = eigh(A)
    scale = np.linalg.norm(A)
    assert np.all(np.diff(evals) >= 0)
    assert np.linalg.norm(A @ V - V * evals) <= 1e-9 * scale
    assert np.linalg.norm(V.conj().T @ V - np.eye(dim)) <= 1e-9
    assert np.linalg.norm(V @ np.diag(evals) @ V.conj().T - A) <= 1e-9 * scale


def test_apply_diag_exp_identity_at_zero():
    cfg = HilbertConfig(3)
    evals, evecs = eigh(tensor(build_boson_ops(cfg).Q, SIGMA_X))
    psi = basis_state(cfg, 1, DOWN)
    np.testing.assert_allclose(apply_diag_exp(psi, evecs, evals, 0.0), psi, atol=1e-14)


def test_apply_diag_exp_sigma_z_phase():
    evals, evecs = eigh(SIGMA_Z)
    down = np.array([0, 1.0], dtype=complex)
    out = apply_diag_exp(down, evecs, evals, math.pi / 2)
    np.testing.assert_allclose(out, 1j * down, atol=1e-14)


def test_apply_diag_exp_number_operator_period():
    n_op = build_boson_ops(HilbertConfig(10)).n_op
    rng = np.random.default_rng(3)
    psi = rng.normal(size=11) + 1j * rng.normal(size=11)
    psi /= np.linalg.norm(psi)
    evals, evecs = eigh(n_op)
    out = apply_diag_exp(psi, evecs, evals, 2 * math.pi)
    reference = scipy.linalg.expm(-2j * math.pi * n_op) @ psi
    np.testing.assert_allclose(out, reference, atol=1e-10)
    np.testing.assert_allclose(out, psi, atol=1e-10)


def test_apply_diag_exp_dimension_mismatch():
    evals, evecs = eigh(SIGMA_Z)
    with pytest.raises(DimensionError):
        apply_diag_exp(np.ones(3), evecs, evals, 1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**31))
def test_apply_diag_exp_composes_and_preserves_norm(t1, t2, seed):
    cfg = HilbertConfig(12)
    rng = np.random.default_rng(seed)
    H3 = tensor(build_boson_ops(cfg).a + build_boson_ops(cfg).a_dag, SIGMA_X)
    evals, evecs = eigh(H3)
    psi = rng.normal(size=cfg.dim) + 1j * rng.normal(size=cfg.dim)
    psi /= np.linalg.norm(psi)
    two = apply_diag_exp(apply_diag_exp(psi, evecs, evals, t2), evecs, evals, t1)
    one = apply_diag_exp(psi, evecs, evals, t1 + t2)
    np.testing.assert_allclose(two, one, atol=1e-10)
    assert abs(np.linalg.norm(one) - 1) < 1e-10


def test_partial_trace_product_state():
    cfg = HilbertConfig(4)
    rho = partial_trace_spin(basis_state(cfg, 2, DOWN))
    expected = np.zeros((5, 5))
    expected[2, 2] = 1
    np.testing.assert_allclose(rho, expected)
    assert purity(rho) == pytest.approx(1.0)


def test_partial_trace_entangled_pair():
    cfg = HilbertConfig(4)
    psi = (basis_state(cfg, 0, UP) + basis_state(cfg, 1, DOWN)) / math.sqrt(2)
    rho = partial_trace_spin(psi)
    np.testing.assert_allclose(rho, np.diag([0.5, 0.5, 0, 0, 0]), atol=1e-15)
    assert purity(rho) == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**31))
def test_partial_trace_is_a_density_matrix(N, seed):
    rng = np.random.default_rng(seed)
    cfg = HilbertConfig(N)
    psi = rng.normal(size=cfg.dim) + 1j * rng.normal(size=cfg.dim)
    psi /= np.linalg.norm(psi)
    rho = partial_trace_spin(psi)
    check_density_matrix(rho)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-10
    assert abs(np.trace(rho) - 1) < 1e-10


def test_check_density_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([1.5, -0.5]))
