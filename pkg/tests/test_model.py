import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from rabi_vqe.analysis import fidelity, quadrature_stats
from rabi_vqe.hilbert import DOWN, IDENTITY_2, SIGMA_X, SIGMA_Z, HilbertConfig, basis_state, build_boson_ops, tensor
from rabi_vqe.model import (
    RabiParams,
    TruncationError,
    build_hamiltonians,
    build_squeeze_operator,
    critical_squeezing_x,
    effective_spectrum,
    exact_ground_state,
    squeezed_ground_state,
    squeezed_vacuum_amplitudes,
)

X_06 = 0.111571775657104877  # -ln(1 - 0.36) / 4


@settings(max_examples=50)
@given(
    st.floats(1e-3, 10),
    st.floats(1e-3, 1e3),
    st.floats(0, 1.5),
)
def test_g_round_trip(omega0, Omega, g):
    assert RabiParams.from_g(omega0, Omega, g).g == pytest.approx(g, abs=1e-12)


def test_critical_coupling_at_largest_omega():
    params = RabiParams.from_g(0.1, 64.0, 1.0)
    assert params.lam == pytest.approx(1.2649110640673517, rel=1e-14)
    assert round(params.lam, 2) == 1.26


def test_invalid_params():
    with pytest.raises(ValueError):
        RabiParams(0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        RabiParams(0.1, 1.0, -0.1)


def test_full_hamiltonian_assembly_is_entry_exact():
    cfg = HilbertConfig(20)
    params = RabiParams(0.1, 8.0, 0.37)
    hs = build_hamiltonians(params, cfg)
    ops = build_boson_ops(cfg)
    direct = (
        params.omega0 * tensor(ops.n_op, IDENTITY_2)
        + (params.Omega / 2) * tensor(np.eye(cfg.boson_dim), SIGMA_Z)
        - params.lam * tensor(ops.a + ops.a_dag, SIGMA_X)
    )
    np.testing.assert_array_equal(hs.H_full, direct)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 2), st.floats(0.1, 100), st.floats(0, 3))
def test_generator_decomposition(omega0, Omega, lam):
    params = RabiParams(omega0, Omega, lam)
    hs = build_hamiltonians(params, HilbertConfig(15))
    np.testing.assert_array_equal(omega0 * hs.H2 + (Omega / 2) * hs.H1 - lam * hs.H3, hs.H_full)


def test_generators_commute_with_parity():
    hs = build_hamiltonians(RabiParams.from_g(0.1, 64.0, 1.0), HilbertConfig(60))
    Pi = hs.parity
    for H in (hs.H1, hs.H2, hs.H3, hs.H_full):
        comm = H @ Pi - Pi @ H
        assert np.max(np.abs(comm)) <= 1e-12 * np.max(np.abs(H))


def test_parity_is_diagonal_signs():
    hs = build_hamiltonians(RabiParams(1, 1, 0), HilbertConfig(3))
    np.testing.assert_array_equal(np.diag(hs.parity), [1, -1, -1, 1, 1, -1, -1, 1])


def test_decoupled_ground_state():
    hs = build_hamiltonians(RabiParams(0.1, 64.0, 0.0), HilbertConfig(60))
    gs = exact_ground_state(hs.H_full, hs.parity)
    assert gs.energy == pytest.approx(-32.0, abs=1e-12)
    np.testing.assert_allclose(gs.state, basis_state(HilbertConfig(60), 0, DOWN), atol=1e-12)
    assert gs.parity == pytest.approx(-1.0)


@pytest.mark.parametrize("Omega", [4.0, 6.4, 64.0, 640.0])
def test_effective_hamiltonian_ground_energy(Omega):
    params = RabiParams.from_g(0.1, Omega, 0.6)
    H_eff = build_hamiltonians(params, HilbertConfig(60)).H_eff
    lowest = np.linalg.eigvalsh(H_eff)[0]
    assert abs(lowest - (-0.01 - Omega / 2)) < 1e-8
    assert effective_spectrum(params, [0])[0] == pytest.approx(-0.01 - Omega / 2, abs=1e-14)


def test_effective_hamiltonian_low_spectrum():
    params = RabiParams.from_g(0.1, 20.0, 0.8)
    evals = np.linalg.eigvalsh(build_hamiltonians(params, HilbertConfig(80)).H_eff)
    np.testing.assert_allclose(evals[:6], effective_spectrum(params, range(6)), atol=1e-8)


def test_critical_ground_state_parity():
    hs = build_hamiltonians(RabiParams.from_g(0.1, 64.0, 1.0), HilbertConfig(60))
    gs = exact_ground_state(hs.H_full, hs.parity)
    assert abs(gs.parity + 1) < 1e-8
    assert gs.gap > 1e-3


def test_critical_ground_energy_converged_in_cutoff():
    params = RabiParams.from_g(0.1, 64.0, 1.0)
    e60 = exact_ground_state(build_hamiltonians(params, HilbertConfig(60)).H_full).energy
    e80 = exact_ground_state(build_hamiltonians(params, HilbertConfig(80)).H_full).energy
    assert abs(e60 - e80) < 1e-8 * abs(e80)


def test_degenerate_ground_state_picks_odd_parity():
    # two exactly degenerate levels of opposite parity
    H = np.diag([-1.0, -1.0, 0.0, 2.0])
    parity = np.diag([1.0, -1.0, 1.0, -1.0])
    gs = exact_ground_state(H, parity)
    assert gs.parity == pytest.approx(-1.0)
    assert gs.gap == 0.0


def test_ground_energy_non_increasing_in_coupling():
    cfg = HilbertConfig(60)
    energies = [
        exact_ground_state(build_hamiltonians(RabiParams(0.1, 16.0, lam), cfg).H_full).energy
        for lam in np.linspace(0, 0.8, 17)
    ]
    assert np.all(np.diff(energies) <= 1e-12)


def test_critical_squeezing_x_values():
    assert critical_squeezing_x(0.0) == 0.0
    assert critical_squeezing_x(0.6) == pytest.approx(X_06, abs=1e-15)
    assert critical_squeezing_x(0.999) == pytest.approx(1.553777055865968, abs=1e-12)
    for bad in (1.0, 1.2, -0.1):
        with pytest.raises(ValueError):
            critical_squeezing_x(bad)


def test_squeeze_operator_identity_and_unitarity():
    cfg = HilbertConfig(60)
    np.testing.assert_allclose(build_squeeze_operator(0.0, cfg), np.eye(61), atol=1e-13)
    S = build_squeeze_operator(0.5, cfg)
    assert np.linalg.norm(S.conj().T @ S - np.eye(61)) < 1e-8


def test_squeeze_operator_matches_expm():
    cfg = HilbertConfig(30)
    ops = build_boson_ops(cfg)
    ref = scipy.linalg.expm(0.35 / 2 * (ops.a_dag @ ops.a_dag - ops.a @ ops.a))
    np.testing.assert_allclose(build_squeeze_operator(0.35, cfg), ref, atol=1e-12)


def test_squeezed_vacuum_statistics():
    cfg = HilbertConfig(60)
    vac = np.zeros(61)
    vac[0] = 1
    psi = build_squeeze_operator(X_06, cfg) @ vac
    pops = np.abs(psi) ** 2
    assert np.max(pops[1::2]) < 1e-12
    assert pops[0] == pytest.approx(0.993807989999906532, abs=1e-12)
    assert pops[2] / pops[0] == pytest.approx(0.00617283950617284, abs=1e-12)
    stats = quadrature_stats(np.outer(psi, psi.conj()))
    assert stats.dp == pytest.approx(0.632455532033675866, abs=1e-10)
    assert stats.dq == pytest.approx(0.790569415042094833, abs=1e-10)
    # series expansion is an independent route to the same state
    np.testing.assert_allclose(psi, squeezed_vacuum_amplitudes(X_06, cfg), atol=1e-12)


def test_negative_squeezing_amplitudes():
    cfg = HilbertConfig(60)
    vac = np.zeros(61)
    vac[0] = 1
    np.testing.assert_allclose(
        build_squeeze_operator(-0.4, cfg) @ vac, squeezed_vacuum_amplitudes(-0.4, cfg), atol=1e-12
    )


def test_squeeze_operator_truncation_errors():
    with pytest.raises(TruncationError):
        build_squeeze_operator(3.5, HilbertConfig(60))
    with pytest.raises(TruncationError):
        build_squeeze_operator(1.5, HilbertConfig(10))


@pytest.mark.parametrize("g", [0.3, 0.6, 0.8, 0.95])
def test_normal_phase_ground_state_is_squeezed_vacuum(g):
    params = RabiParams.from_g(0.1, 64.0, g)  # Omega / omega0 = 640
    cfg = HilbertConfig(60)
    hs = build_hamiltonians(params, cfg)
    gs = exact_ground_state(hs.H_full, hs.parity)
    assert fidelity(gs.state, squeezed_ground_state(params, cfg)) > 0.99
