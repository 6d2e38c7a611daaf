"""Quantum Rabi Hamiltonian, its HVA generator split, parity, and analytic references."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .hilbert import (
    DOWN,
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    HilbertConfig,
    build_boson_ops,
    eigh,
    expectation,
    tensor,
)

DEGENERACY_TOL = 1e-10
MAX_SQUEEZE = 3.0


class TruncationError(ValueError):
    """Requested state does not fit in the Fock cutoff."""


@dataclass(frozen=True)
class RabiParams:
    omega0: float
    Omega: float
    lam: float

    def __post_init__(self):
        if not self.omega0 > 0 or not self.Omega > 0:
            raise ValueError(f"frequencies must be positive, got omega0={self.omega0}, Omega={self.Omega}")
        if not self.lam >= 0:
            raise ValueError(f"coupling must be non-negative, got lam={self.lam}")

    @classmethod
    def from_g(cls, omega0: float, Omega: float, g: float) -> "RabiParams":
        return cls(omega0=omega0, Omega=Omega, lam=g * math.sqrt(omega0 * Omega) / 2.0)

    @property
    def g(self) -> float:
        return 2.0 * self.lam / math.sqrt(self.omega0 * self.Omega)


@dataclass(frozen=True)
class HamiltonianSet:
    H_full: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    H_eff: np.ndarray
    parity: np.ndarray


def parity_operator(cfg: HilbertConfig) -> np.ndarray:
    """``exp(i pi a^dag a) (x) sigma_z`` as a diagonal matrix."""
    signs = (-1.0) ** np.arange(cfg.boson_dim)
    return tensor(np.diag(signs), SIGMA_Z)


def parity_diagonal(cfg: HilbertConfig) -> np.ndarray:
    return np.kron((-1.0) ** np.arange(cfg.boson_dim), np.diag(SIGMA_Z))


def build_hamiltonians(params: RabiParams, cfg: HilbertConfig) -> HamiltonianSet:
    ops = build_boson_ops(cfg)
    eye_b = np.eye(cfg.boson_dim)
    x_op = ops.a + ops.a_dag

    H1 = tensor(eye_b, SIGMA_Z)
    H2 = tensor(ops.n_op, IDENTITY_2)
    H3 = tensor(x_op, SIGMA_X)
    H_full = params.omega0 * H2 + (params.Omega / 2.0) * H1 - params.lam * H3

    g = params.g
    H_eff = (
        params.omega0 * ops.n_op
        - (params.omega0 * g**2 / 4.0) * (x_op @ x_op)
        - (params.Omega / 2.0) * eye_b
    )
    return HamiltonianSet(H_full=H_full, H1=H1, H2=H2, H3=H3, H_eff=H_eff, parity=parity_operator(cfg))


def effective_spectrum(params: RabiParams, levels) -> np.ndarray:
    """Analytic eigenvalues of the effective boson Hamiltonian (normal phase, g < 1)."""
    g = params.g
    if g >= 1:
        raise ValueError(f"effective spectrum is gapless or unbounded for g={g}")
    n = np.asarray(levels, dtype=float)
    w = params.omega0 * math.sqrt(1.0 - g**2)
    return w * (n + 0.5) - params.omega0 / 2.0 - params.Omega / 2.0


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: np.ndarray
    gap: float
    parity: float


def exact_ground_state(H: np.ndarray, parity: np.ndarray | None = None) -> GroundState:
    """Lowest eigenpair of ``H`` by dense diagonalization.

    If the bottom of the spectrum is degenerate to within 1e-10 and a parity
    operator is supplied, the degenerate block is diagonalized in parity and
    the odd (``<Pi> = -1``) combination is returned.  The global phase is fixed
    so the largest amplitude is real and positive.
    """
    evals, evecs = eigh(H)
    state = evecs[:, 0]
    gap = float(evals[1] - evals[0]) if len(evals) > 1 else math.inf
    if parity is not None and gap < DEGENERACY_TOL:
        k = int(np.searchsorted(evals, evals[0] + DEGENERACY_TOL, side="right"))
        block = evecs[:, :k]
        pv, pw = np.linalg.eigh(block.conj().T @ parity @ block)
        state = block @ pw[:, 0]
    state = state / np.linalg.norm(state)
    pivot = state[np.argmax(np.abs(state))]
    state = state * (abs(pivot) / pivot)
    par = float(expectation(parity, state).real) if parity is not None else math.nan
    return GroundState(energy=float(evals[0]), state=state.astype(complex), gap=gap, parity=par)


def critical_squeezing_x(g: float) -> float:
    """Squeezing parameter of the low-energy eigenstates, ``-ln(1 - g^2) / 4``."""
    if not 0 <= g < 1:
        raise ValueError(f"squeezing parameter defined for 0 <= g < 1, got g={g}")
    return -0.25 * math.log1p(-g * g)


def squeezed_vacuum_populations(x: float, n_max: int) -> np.ndarray:
    """Exact Fock populations of ``S(x)|0>`` for n = 0..n_max (untruncated state)."""
    pops = np.zeros(n_max + 1)
    if x == 0:
        pops[0] = 1.0
        return pops
    k = np.arange(0, n_max + 1, 2) // 2
    logp = gammaln(2 * k + 1) - 2 * k * math.log(2.0) - 2 * gammaln(k + 1) + 2 * k * math.log(math.tanh(abs(x)))
    pops[::2] = np.exp(logp) / math.cosh(x)
    return pops


def squeezed_vacuum_amplitudes(x: float, cfg: HilbertConfig) -> np.ndarray:
    """Series coefficients of ``S(x)|0>``, cut at the Fock cutoff (not renormalized)."""
    pops = squeezed_vacuum_populations(x, cfg.fock_cutoff)
    amps = np.sqrt(pops)
    k = np.arange(cfg.boson_dim) // 2
    if x < 0:
        amps = amps * (-1.0) ** k
    return amps


def build_squeeze_operator(x: float, cfg: HilbertConfig, tail_tol: float = 1e-6) -> np.ndarray:
    """Boson squeeze operator ``exp((x/2)(a_dag^2 - a^2))`` on the truncated space.

    Raises ``TruncationError`` when ``S(x)|0>`` leaks more than ``tail_tol``
    probability past the cutoff, or when ``|x| > 3``.
    """
    if abs(x) > MAX_SQUEEZE:
        raise TruncationError(f"|x|={abs(x)} exceeds the supported squeezing range {MAX_SQUEEZE}")
    tail = 1.0 - squeezed_vacuum_populations(x, cfg.fock_cutoff).sum()
    if tail > tail_tol:
        raise TruncationError(
            f"squeezed vacuum with x={x} loses {tail:.2e} probability beyond cutoff {cfg.fock_cutoff}"
        )
    ops = build_boson_ops(cfg)
    gen = 0.5j * (ops.a_dag @ ops.a_dag - ops.a @ ops.a)
    evals, evecs = eigh(gen)
    return evecs @ np.diag(np.exp(-1j * x * evals)) @ evecs.conj().T


def squeezed_ground_state(params: RabiParams, cfg: HilbertConfig) -> np.ndarray:
    """Normal-phase prediction ``S(x)|0> (x) |down>`` as a hybrid state."""
    x = critical_squeezing_x(params.g)
    vac = np.zeros(cfg.boson_dim)
    vac[0] = 1.0
    boson = build_squeeze_operator(x, cfg) @ vac
    spin_down = np.zeros(2)
    spin_down[DOWN] = 1.0
    return np.kron(boson, spin_down)
