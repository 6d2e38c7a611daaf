"""
Phase-space pictures
====================

Wigner functions on a grid, first for the vacuum and then for the exact
critical ground state at Omega = 64. Prints a coarse character map of each.
"""
import numpy as np

from rabi_vqe import HilbertConfig, RabiParams, build_hamiltonians, exact_ground_state, partial_trace_spin
from rabi_vqe.analysis import wigner

cfg = HilbertConfig(60)
axis = np.linspace(-4, 4, 41)
SHADES = " .:-=+*#%@"


def show(grid):
    # rows run over P from top to bottom, columns over Q
    w = grid.values.T[::-1]
    scale = np.abs(w).max()
    for row in w[::2]:
        print("".join(SHADES[int(round((len(SHADES) - 1) * max(v, 0) / scale))] for v in row))


vac = np.zeros((61, 61))
vac[0, 0] = 1
g_vac = wigner(vac, axis, axis)
print(f"vacuum: W(0,0) = {g_vac.values[20, 20]:.6f}  (1/pi = {1 / np.pi:.6f}), total {g_vac.total():.6f}")
show(g_vac)

hs = build_hamiltonians(RabiParams.from_g(0.1, 64.0, 1.0), cfg)
rho = partial_trace_spin(exact_ground_state(hs.H_full, hs.parity).state)
g_crit = wigner(rho, axis, axis)
# The +-4 window clips the long Q tail; use a wider grid for the moments.
wide = np.linspace(-12, 12, 241)
m = wigner(rho, wide, wide).moments()
print(f"\ncritical state: var Q = {m['var_q']:.4f}, var P = {m['var_p']:.4f} (vacuum: 0.5 each)")
show(g_crit)
