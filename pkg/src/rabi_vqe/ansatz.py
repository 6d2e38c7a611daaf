"""Hamiltonian variational ansatz for the Rabi model.

One block is ``exp(-i g H3) exp(-i b H2) exp(-i a H1)`` with ``H1 = sigma_z``,
``H2 = a^dag a`` and ``H3 = (a + a^dag) sigma_x``; the ``H1`` factor acts first.
``H1`` and ``H2`` are diagonal in the product basis and are applied as phases,
``H3`` is diagonalized once at compile time.

Every generator commutes with the parity ``Pi``, so a circuit can also be
compiled on a single parity sector.  The odd sector (which holds the initial
state) is half the size of the full space and is what the optimizer uses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import DOWN, DimensionError, HilbertConfig, basis_state, eigh
from .model import RabiParams, build_hamiltonians, parity_diagonal

ODD, EVEN = -1, 1


@dataclass(frozen=True)
class AnsatzParams:
    """Block parameters as a ``(p, 3)`` array of ``(alpha, beta, gamma)`` rows."""

    thetas: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        arr = np.array(self.thetas, dtype=float).reshape(-1, 3)
        arr.setflags(write=False)
        object.__setattr__(self, "thetas", arr)

    @property
    def depth(self) -> int:
        return self.thetas.shape[0]

    @classmethod
    def zeros(cls, depth: int) -> "AnsatzParams":
        return cls(np.zeros((depth, 3)))

    @classmethod
    def from_flat(cls, flat) -> "AnsatzParams":
        flat = np.asarray(flat, dtype=float)
        if flat.size % 3:
            raise ValueError(f"flat parameter vector length {flat.size} is not a multiple of 3")
        return cls(flat.reshape(-1, 3))

    def flat(self) -> np.ndarray:
        return self.thetas.ravel().copy()

    def __add__(self, other: "AnsatzParams") -> "AnsatzParams":
        return AnsatzParams(np.vstack([self.thetas, other.thetas]))


@dataclass(frozen=True)
class CompiledAnsatz:
    cfg: HilbertConfig
    h1_diag: np.ndarray
    h2_diag: np.ndarray
    h3: np.ndarray
    h3_evals: np.ndarray
    h3_evecs: np.ndarray
    # indices of the retained product-basis states; None means the full space
    basis: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.h1_diag.shape[0]

    def restrict_state(self, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state)
        if state.shape[0] == self.dim:
            return state
        if self.basis is None or state.shape[0] != self.cfg.dim:
            raise DimensionError(f"state of length {state.shape[0]} does not fit a circuit of dim {self.dim}")
        return state[self.basis]

    def restrict_operator(self, op: np.ndarray) -> np.ndarray:
        op = np.asarray(op)
        if op.shape == (self.dim, self.dim):
            return op
        if self.basis is None or op.shape != (self.cfg.dim, self.cfg.dim):
            raise DimensionError(f"operator of shape {op.shape} does not fit a circuit of dim {self.dim}")
        return op[np.ix_(self.basis, self.basis)]

    def embed_state(self, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state)
        if self.basis is None:
            return state
        full = np.zeros(self.cfg.dim, dtype=complex)
        full[self.basis] = state
        return full


def compile_ansatz(cfg: HilbertConfig, sector: int | None = None) -> CompiledAnsatz:
    """Cache the three generators; ``sector`` = -1 or +1 restricts to that parity."""
    # generators do not depend on the couplings
    hs = build_hamiltonians(RabiParams(1.0, 1.0, 0.0), cfg)
    h1 = np.diag(hs.H1).real.copy()
    h2 = np.diag(hs.H2).real.copy()
    h3 = hs.H3.real.copy()
    basis = None
    if sector is not None:
        if sector not in (ODD, EVEN):
            raise ValueError(f"sector must be -1 or +1, got {sector}")
        basis = np.flatnonzero(parity_diagonal(cfg) == sector)
        h1, h2 = h1[basis], h2[basis]
        h3 = h3[np.ix_(basis, basis)]
    evals, evecs = eigh(h3)
    return CompiledAnsatz(cfg, h1, h2, h3, evals, evecs, basis)


def initial_state(cfg: HilbertConfig) -> np.ndarray:
    """Vacuum cavity with the qubit spin-down: ``|0> (x) |down>``."""
    return basis_state(cfg, 0, DOWN)


@dataclass(frozen=True)
class AnsatzOutput:
    final: np.ndarray
    blocks: list[np.ndarray] | None = None


def apply_block(compiled: CompiledAnsatz, theta, state: np.ndarray) -> np.ndarray:
    alpha, beta, gamma = theta
    state = np.exp(-1j * (alpha * compiled.h1_diag + beta * compiled.h2_diag)) * state
    v = compiled.h3_evecs
    return v @ (np.exp(-1j * gamma * compiled.h3_evals) * (v.T @ state))


def apply_ansatz(
    compiled: CompiledAnsatz,
    params: AnsatzParams,
    psi0: np.ndarray,
    capture_blocks: bool = False,
) -> AnsatzOutput:
    """Run ``U(theta) psi0``; optionally keep the state after every block."""
    psi = compiled.restrict_state(psi0).astype(complex)
    blocks = [] if capture_blocks else None
    for theta in params.thetas:
        psi = apply_block(compiled, theta, psi)
        if capture_blocks:
            blocks.append(psi)
    return AnsatzOutput(final=psi, blocks=blocks)
