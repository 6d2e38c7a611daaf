"""State diagnostics: fidelity, Wigner function, Fock populations, quadratures, fits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    UP,
    DimensionError,
    HilbertConfig,
    build_boson_ops,
    check_density_matrix,
    partial_trace_spin,
)

SQL = 1.0 / math.sqrt(2.0)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"states have shapes {a.shape} and {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


# -- Wigner function ---------------------------------------------------------


@dataclass(frozen=True)
class WignerGrid:
    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # values[i, j] = W(q_axis[i], p_axis[j])

    @property
    def dq(self) -> float:
        return float(self.q_axis[1] - self.q_axis[0])

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0])

    def total(self) -> float:
        return float(self.values.sum() * self.dq * self.dp)

    def moments(self) -> dict[str, float]:
        """Means and variances of Q and P from the grid."""
        w = self.values * self.dq * self.dp
        norm = w.sum()
        q = self.q_axis[:, None]
        p = self.p_axis[None, :]
        mq = float((w * q).sum() / norm)
        mp = float((w * p).sum() / norm)
        return {
            "mean_q": mq,
            "mean_p": mp,
            "var_q": float((w * (q - mq) ** 2).sum() / norm),
            "var_p": float((w * (p - mp) ** 2).sum() / norm),
        }


def parse_grid(spec: str) -> np.ndarray:
    """``"qmin:qmax:npts"`` -> uniform axis."""
    try:
        lo, hi, n = spec.split(":")
        axis = np.linspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise ValueError(f"grid spec must look like 'qmin:qmax:npts', got {spec!r}") from exc
    if axis.size < 2 or not float(hi) > float(lo):
        raise ValueError(f"grid spec {spec!r} needs qmax > qmin and at least 2 points")
    return axis


def default_axis() -> np.ndarray:
    return np.linspace(-8.0, 8.0, 201)


def _check_uniform(axis: np.ndarray, name: str) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"{name} must be a 1-d axis with at least two points")
    step = np.diff(axis)
    if np.any(step <= 0) or np.ptp(step) > 1e-9 * abs(step[0]):
        raise ValueError(f"{name} must be uniform and increasing")
    return axis


def wigner(rho: np.ndarray, q_axis=None, p_axis=None) -> WignerGrid:
    """Wigner function of a Fock-basis density matrix on a ``(q, p)`` grid.

    Uses the closed form for ``|m><n|`` (``m = n + d``)::

        W = (-1)^n / pi * sqrt(n!/m!) * (sqrt2 (q - i p))^d * L_n^(d)(2r^2) * exp(-r^2)

    summed one diagonal ``d`` at a time; the Laguerre factor runs through a
    normalized three-term recurrence so nothing overflows at large cutoffs.
    """
    rho = np.asarray(rho)
    check_density_matrix(rho)
    q_axis = _check_uniform(default_axis() if q_axis is None else q_axis, "q_axis")
    p_axis = _check_uniform(default_axis() if p_axis is None else p_axis, "p_axis")
    Q, P = np.meshgrid(q_axis, p_axis, indexing="ij")
    x = 2.0 * (Q**2 + P**2)
    z = math.sqrt(2.0) * (Q - 1j * P)
    dim = rho.shape[0]

    total = np.zeros(Q.shape)
    # lead[d] = z^d / sqrt(d!) * exp(-x/2)
    lead = np.exp(-x / 2.0).astype(complex)
    for d in range(dim):
        if d > 0:
            lead = lead * z / math.sqrt(d)
        coeffs = np.diagonal(rho, offset=-d)  # rho[n + d, n]
        f_prev = np.zeros_like(lead)
        f = lead.copy()  # sqrt(n!/(n+d)!) L_n^(d)(x) times lead, at n = 0
        acc = coeffs[0] * f
        for n in range(len(coeffs) - 1):
            f_next = ((2 * n + 1 + d - x) * f - math.sqrt(n * (n + d)) * f_prev) / math.sqrt((n + 1) * (n + 1 + d))
            f_prev, f = f, f_next
            if coeffs[n + 1] != 0:
                acc = acc + ((-1) ** (n + 1)) * coeffs[n + 1] * f
        total += (1.0 if d == 0 else 2.0) * acc.real
    return WignerGrid(q_axis=q_axis, p_axis=p_axis, values=total / math.pi)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Oscillator eigenfunctions ``<x|n>`` for n = 0..n_max, shape ``(n_max+1, len(x))``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-(x**2) / 2.0)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def wavefunction(coeffs: np.ndarray, x) -> np.ndarray:
    """Position-space wavefunction of a pure boson state given Fock amplitudes."""
    coeffs = np.asarray(coeffs)
    return coeffs @ hermite_functions(len(coeffs) - 1, x)


def position_density(rho: np.ndarray, x) -> np.ndarray:
    """``<x|rho|x>`` for a Fock-basis density matrix."""
    phi = hermite_functions(rho.shape[0] - 1, x)
    return np.einsum("mx,mn,nx->x", phi, rho, phi).real


def wigner_quadrature(coeffs: np.ndarray, q_axis, p_axis, half_width: float = 24.0, n_points: int = 4801) -> np.ndarray:
    """Wigner function of a pure state by direct integration over the shift variable.

    ``W(Q, P) = 1/(2 pi) int psi*(Q + s/2) psi(Q - s/2) exp(i P s) ds``, with a
    trapezoid rule on ``s`` in ``[-half_width, half_width]``.
    """
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    s = np.linspace(-half_width, half_width, n_points)
    ds = s[1] - s[0]
    weights = np.full(n_points, ds)
    weights[[0, -1]] *= 0.5
    plus = wavefunction(coeffs, (q_axis[:, None] + s[None, :] / 2.0).ravel()).reshape(len(q_axis), n_points)
    minus = wavefunction(coeffs, (q_axis[:, None] - s[None, :] / 2.0).ravel()).reshape(len(q_axis), n_points)
    kernel = plus.conj() * minus * weights
    phases = np.exp(1j * np.outer(s, p_axis))
    return (kernel @ phases).real / (2.0 * math.pi)


# -- populations and quadratures ---------------------------------------------


def fock_distribution(rho: np.ndarray) -> np.ndarray:
    pops = np.real(np.diagonal(rho)).copy()
    if abs(pops.sum() - 1.0) > 1e-10:
        raise ValueError(f"Fock populations sum to {pops.sum()!r}")
    return pops


def odd_population(pops: np.ndarray) -> float:
    return float(np.sum(pops[1::2]))


def spin_up_weight(state: np.ndarray) -> float:
    amps = np.asarray(state).reshape(-1, 2)
    return float(np.sum(np.abs(amps[:, UP]) ** 2))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


@dataclass(frozen=True)
class QuadratureStats:
    dq: float
    dp: float
    mean_q: float
    mean_p: float

    @property
    def product(self) -> float:
        return self.dq * self.dp


def quadrature_stats(rho: np.ndarray, Q: np.ndarray | None = None, P: np.ndarray | None = None) -> QuadratureStats:
    """Standard deviations of the position and momentum quadratures in ``rho``."""
    if Q is None or P is None:
        ops = build_boson_ops(HilbertConfig(rho.shape[0] - 1))
        Q = ops.Q if Q is None else Q
        P = ops.P if P is None else P

    def moments(op):
        mean = np.trace(rho @ op).real
        second = np.trace(rho @ op @ op).real
        var = second - mean**2
        if var < -1e-10:
            raise FloatingPointError(f"negative quadrature variance {var:.3e}")
        return float(mean), math.sqrt(max(var, 0.0))

    mq, dq = moments(Q)
    mp, dp = moments(P)
    return QuadratureStats(dq=dq, dp=dp, mean_q=mq, mean_p=mp)


# -- fits and depth summaries -------------------------------------------------


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float


def powerlaw_fit(x, y) -> PowerLawFit:
    """Least-squares line through ``(ln x, ln y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise ValueError("power-law fit needs two equal-length vectors with at least 3 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(resid @ resid) / ss_tot
    return PowerLawFit(float(slope), float(intercept), min(1.0, max(0.0, r2)))


def threshold_depth(depths, infidelities, threshold: float) -> int | None:
    """Smallest depth whose infidelity is at or below ``threshold``."""
    for p, inf in zip(depths, infidelities):
        if inf <= threshold:
            return int(p)
    return None


def saturation_depth(depths, values, tol: float = 1e-3) -> int:
    """Smallest depth after which ``values`` stay within ``tol`` of the last value."""
    depths = list(depths)
    values = np.asarray(values, dtype=float)
    final = values[-1]
    sat = depths[-1]
    for p, v in zip(reversed(depths), values[::-1]):
        if abs(v - final) > tol:
            break
        sat = p
    return int(sat)


# -- block-by-block traces ----------------------------------------------------


@dataclass(frozen=True)
class BlockReport:
    block: int
    fock: np.ndarray
    quad: QuadratureStats
    parity: float
    norm: float
    purity: float
    wigner: WignerGrid | None = None


def block_trace_report(states, parity: np.ndarray, q_axis=None, p_axis=None, with_wigner: bool = False) -> list[BlockReport]:
    """Diagnostics for a sequence of hybrid states; ``states[0]`` is block 0 (the input)."""
    reports = []
    ops = None
    for j, state in enumerate(states):
        rho = partial_trace_spin(state)
        if ops is None:
            ops = build_boson_ops(HilbertConfig(rho.shape[0] - 1))
        reports.append(
            BlockReport(
                block=j,
                fock=fock_distribution(rho),
                quad=quadrature_stats(rho, ops.Q, ops.P),
                parity=float(np.vdot(state, parity @ state).real),
                norm=float(np.linalg.norm(state)),
                purity=float(np.real(np.trace(rho @ rho))),
                wigner=wigner(rho, q_axis, p_axis) if with_wigner else None,
            )
        )
    return reports
