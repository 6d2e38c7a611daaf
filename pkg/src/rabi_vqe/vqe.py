"""Variational energy minimization over HVA parameters."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .ansatz import ODD, AnsatzParams, CompiledAnsatz, apply_ansatz, compile_ansatz, initial_state
from .hilbert import HilbertConfig
from .model import GroundState, RabiParams, build_hamiltonians, exact_ground_state, parity_operator
from .optimize import NonFiniteCost, bfgs

log = logging.getLogger(__name__)

IMAG_TOL = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 3000
    gradient_step: float = 1e-6
    convergence_tol: float = 1e-12
    restarts: int = 5
    init_scale: float = 0.1
    seed: int = 0
    gradient: str = "adjoint"
    grad_tol: float = 1e-11
    patience: int = 20

    def __post_init__(self):
        if not self.gradient_step > 0:
            raise ValueError("gradient_step must be positive")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.gradient not in ("adjoint", "fd"):
            raise ValueError(f"gradient must be 'adjoint' or 'fd', got {self.gradient!r}")


@dataclass(frozen=True)
class RestartRecord:
    index: int
    energy: float
    iterations: int
    status: str


@dataclass
class VqeRun:
    depth: int
    best_thetas: AnsatzParams
    best_energy: float
    exact_energy: float
    fidelity: float
    energy_history: list[float]
    seed: int
    wall_time: float
    params: RabiParams | None = None
    best_restart: int = 0
    restarts: list[RestartRecord] = field(default_factory=list)

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity


def _prepare(compiled: CompiledAnsatz, H: np.ndarray, psi0):
    psi0 = initial_state(compiled.cfg) if psi0 is None else psi0
    return compiled.restrict_operator(H), compiled.restrict_state(psi0).astype(complex)


def _expectation(H, psi) -> float:
    val = np.vdot(psi, H @ psi)
    if abs(val.imag) > IMAG_TOL:
        raise ValueError(f"energy has imaginary part {val.imag:.3e}; is H Hermitian?")
    return float(val.real)


def cost(compiled: CompiledAnsatz, H: np.ndarray, params: AnsatzParams, psi0=None) -> float:
    """Energy ``<psi(theta)|H|psi(theta)>``."""
    H, psi0 = _prepare(compiled, H, psi0)
    return _expectation(H, apply_ansatz(compiled, params, psi0).final)


def gradient(
    compiled: CompiledAnsatz,
    H: np.ndarray,
    params: AnsatzParams,
    h: float = 1e-6,
    psi0=None,
    stencil: int = 2,
) -> np.ndarray:
    """Finite-difference gradient, central 2-point or 4-point stencil."""
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    H, psi0 = _prepare(compiled, H, psi0)
    x = params.flat()

    def f(v):
        return _expectation(H, apply_ansatz(compiled, AnsatzParams.from_flat(v), psi0).final)

    grad = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        if stencil == 2:
            grad[k] = (f(x + e) - f(x - e)) / (2 * h)
        elif stencil == 4:
            grad[k] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h)
        else:
            raise ValueError(f"stencil must be 2 or 4, got {stencil}")
    return grad


def energy_and_gradient(compiled: CompiledAnsatz, H: np.ndarray, flat, psi0) -> tuple[float, np.ndarray]:
    """Energy and its exact parameter gradient by one forward and one backward sweep.

    ``H`` and ``psi0`` must already live in the circuit's basis.
    """
    thetas = np.asarray(flat, dtype=float).reshape(-1, 3)
    h1, h2 = compiled.h1_diag, compiled.h2_diag
    v, w = compiled.h3_evecs, compiled.h3_evals
    mids, outs = [], []
    psi = psi0
    for alpha, beta, gamma in thetas:
        psi = np.exp(-1j * (alpha * h1 + beta * h2)) * psi
        mids.append(psi)
        psi = v @ (np.exp(-1j * gamma * w) * (v.T @ psi))
        outs.append(psi)
    hpsi = H @ psi
    energy = float(np.vdot(psi, hpsi).real)
    # lam holds U_rest^dag H psi_final as the sweep walks back through the gates
    lam = hpsi
    grad = np.empty_like(thetas)
    for j in range(thetas.shape[0] - 1, -1, -1):
        alpha, beta, gamma = thetas[j]
        grad[j, 2] = 2.0 * np.vdot(lam, compiled.h3 @ outs[j]).imag
        lam = v @ (np.exp(1j * gamma * w) * (v.T @ lam))
        grad[j, 0] = 2.0 * np.vdot(lam, h1 * mids[j]).imag
        grad[j, 1] = 2.0 * np.vdot(lam, h2 * mids[j]).imag
        lam = np.exp(1j * (alpha * h1 + beta * h2)) * lam
    return energy, grad.ravel()


def _objective(compiled, H, psi0, cfg: OptimizerConfig):
    if cfg.gradient == "adjoint":
        return lambda x: energy_and_gradient(compiled, H, x, psi0)

    def fd(x):
        params = AnsatzParams.from_flat(x)
        e = _expectation(H, apply_ansatz(compiled, params, psi0).final)
        return e, gradient(compiled, H, params, cfg.gradient_step, psi0)

    return fd


def _starting_points(p: int, cfg: OptimizerConfig, warm_start: AnsatzParams | None) -> list[np.ndarray]:
    base = np.zeros(3 * p)
    if warm_start is not None:
        if warm_start.depth != p - 1:
            raise ValueError(f"warm start has depth {warm_start.depth}, expected {p - 1}")
        base[: 3 * (p - 1)] = warm_start.flat()
    rng = np.random.default_rng([cfg.seed, p])
    noise = [rng.uniform(-cfg.init_scale, cfg.init_scale, 3 * p) for _ in range(cfg.restarts - 1)]
    return [base] + [base + n for n in noise]


def optimize_depth(
    compiled: CompiledAnsatz,
    H: np.ndarray,
    p: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    warm_start: AnsatzParams | None = None,
    target: GroundState | None = None,
    psi0=None,
    params: RabiParams | None = None,
) -> VqeRun:
    """Best of ``cfg.restarts`` BFGS descents at depth ``p``.

    Restart 0 starts from ``warm_start`` with an identity block appended, so
    its starting energy is the depth ``p - 1`` optimum.  Later restarts add
    uniform noise of amplitude ``cfg.init_scale`` to every parameter.
    """
    if p < 1:
        raise ValueError("depth must be >= 1")
    t0 = time.perf_counter()
    if target is None:
        if H.shape[0] != compiled.cfg.dim:
            raise ValueError("pass target= when H is given in a reduced basis")
        target = exact_ground_state(H, parity_operator(compiled.cfg))
    Hr, psi0r = _prepare(compiled, H, psi0)
    fun = _objective(compiled, Hr, psi0r, cfg)

    records = []
    best = None
    for r, x0 in enumerate(_starting_points(p, cfg, warm_start)):
        try:
            res = bfgs(fun, x0, cfg.max_iterations, cfg.convergence_tol, cfg.grad_tol, cfg.patience)
        except NonFiniteCost as exc:
            log.warning("restart %d at depth %d aborted: %s", r, p, exc)
            records.append(RestartRecord(r, float("nan"), 0, f"aborted: {exc}"))
            continue
        records.append(RestartRecord(r, res.fun, res.n_iter, res.status))
        # strict inequality keeps the lowest restart index on ties
        if best is None or res.fun < best[1].fun:
            best = (r, res)
    if best is None:
        raise NonFiniteCost(f"every restart at depth {p} produced a non-finite cost")

    r_best, res = best
    thetas = AnsatzParams.from_flat(res.x)
    final = compiled.embed_state(apply_ansatz(compiled, thetas, psi0r).final)
    fid = min(1.0, max(0.0, abs(np.vdot(target.state, final)) ** 2))
    return VqeRun(
        depth=p,
        best_thetas=thetas,
        best_energy=float(res.fun),
        exact_energy=target.energy,
        fidelity=float(fid),
        energy_history=list(res.history),
        seed=cfg.seed,
        wall_time=time.perf_counter() - t0,
        params=params,
        best_restart=r_best,
        restarts=records,
    )


def depth_sweep(
    params: RabiParams,
    p_max: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    hilbert: HilbertConfig = HilbertConfig(),
    sector: int | None = ODD,
) -> list[VqeRun]:
    """Optimize depths 1..p_max, warm-starting each from the previous optimum."""
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    hs = build_hamiltonians(params, hilbert)
    target = exact_ground_state(hs.H_full, hs.parity)
    compiled = compile_ansatz(hilbert, sector)
    runs = []
    warm = AnsatzParams.zeros(0)
    for p in range(1, p_max + 1):
        run = optimize_depth(compiled, hs.H_full, p, cfg, warm, target, params=params)
        log.info("Omega=%g p=%d E-E0=%.3e 1-F=%.3e", params.Omega, p, run.best_energy - target.energy, run.infidelity)
        runs.append(run)
        warm = run.best_thetas
    return runs
