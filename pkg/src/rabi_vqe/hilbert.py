"""Truncated boson x qubit Hilbert space.

States are flat complex vectors with spin-fast ordering: index ``2*n + s``
with ``s = 0`` for spin-up and ``s = 1`` for spin-down.  Operators are dense
numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-12
NORM_TOL = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
IDENTITY_2 = np.eye(2)

UP, DOWN = 0, 1


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class HilbertConfig:
    fock_cutoff: int = 60

    def __post_init__(self):
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ValueError(f"fock_cutoff must be an integer >= 1, got {self.fock_cutoff!r}")

    @property
    def boson_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return 2 * (self.fock_cutoff + 1)


@dataclass(frozen=True)
class BosonOps:
    a: np.ndarray
    a_dag: np.ndarray
    n_op: np.ndarray
    Q: np.ndarray
    P: np.ndarray


def build_boson_ops(cfg: HilbertConfig) -> BosonOps:
    """Ladder, number and quadrature matrices on the (N+1)-dim Fock space.

    The cutoff is hard: ``a_dag`` maps ``|N>`` to zero, so ``[Q, P] = i``
    fails only in the last diagonal entry.
    """
    a = np.diag(np.sqrt(np.arange(1, cfg.boson_dim, dtype=float)), 1)
    a_dag = a.T.copy()
    n_op = a_dag @ a
    Q = (a + a_dag) / np.sqrt(2.0)
    P = -1j * (a - a_dag) / np.sqrt(2.0)
    return BosonOps(a=a, a_dag=a_dag, n_op=n_op, Q=Q, P=P)


def tensor(boson_op: np.ndarray, spin_op: np.ndarray) -> np.ndarray:
    """Embed ``boson_op (x) spin_op`` in the spin-fast hybrid basis."""
    boson_op = np.asarray(boson_op)
    spin_op = np.asarray(spin_op)
    if spin_op.shape != (2, 2):
        raise DimensionError(f"spin operator must be 2x2, got {spin_op.shape}")
    if boson_op.ndim != 2 or boson_op.shape[0] != boson_op.shape[1]:
        raise DimensionError(f"boson operator must be square, got {boson_op.shape}")
    return np.kron(boson_op, spin_op)


def basis_state(cfg: HilbertConfig, n: int, s: int) -> np.ndarray:
    """Product state ``|n> (x) |s>``."""
    if not 0 <= n <= cfg.fock_cutoff or s not in (UP, DOWN):
        raise ValueError(f"no basis state (n={n}, s={s}) at cutoff {cfg.fock_cutoff}")
    psi = np.zeros(cfg.dim, dtype=complex)
    psi[2 * n + s] = 1.0
    return psi


def is_hermitian(op: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    scale = np.max(np.abs(op)) if op.size else 0.0
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= rtol * max(scale, 1e-300))


def eigh(op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    op = np.asarray(op)
    if not is_hermitian(op):
        raise NotHermitianError("eigh requires a Hermitian operator")
    # symmetrize away rounding so LAPACK sees an exactly Hermitian input
    evals, evecs = np.linalg.eigh(0.5 * (op + op.conj().T))
    return evals, evecs


def apply_diag_exp(state: np.ndarray, eigvecs: np.ndarray, eigvals: np.ndarray, t: float) -> np.ndarray:
    """Apply ``exp(-i t A)`` given the eigendecomposition of ``A``."""
    state = np.asarray(state)
    if eigvecs.shape != (state.shape[0], state.shape[0]) or eigvals.shape != state.shape:
        raise DimensionError(
            f"state of length {state.shape[0]} does not match generator of shape {eigvecs.shape}"
        )
    return eigvecs @ (np.exp(-1j * t * eigvals) * (eigvecs.conj().T @ state))


def apply_phase(state: np.ndarray, diagonal: np.ndarray, t: float) -> np.ndarray:
    """Apply ``exp(-i t D)`` for a generator that is diagonal in the product basis."""
    if diagonal.shape != state.shape:
        raise DimensionError(f"diagonal {diagonal.shape} vs state {state.shape}")
    return np.exp(-1j * t * diagonal) * state


def norm(state: np.ndarray) -> float:
    return float(np.linalg.norm(state))


def expectation(op: np.ndarray, state: np.ndarray) -> complex:
    return complex(np.vdot(state, op @ state))


def partial_trace_spin(state: np.ndarray) -> np.ndarray:
    """Reduced boson density matrix ``rho[m, n] = sum_s psi(m,s) psi*(n,s)``."""
    state = np.asarray(state)
    if state.ndim != 1 or state.shape[0] % 2:
        raise DimensionError(f"hybrid state must have even length, got {state.shape}")
    amps = state.reshape(-1, 2)
    return amps @ amps.conj().T


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(rho))):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lo < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
