"""
Exact ground states of the Rabi model near criticality
======================================================

Diagonalize the truncated Hamiltonian, compare with the quadratic
low-energy model, and watch the squeezing grow with the qubit splitting.
Runs in about a second.
"""
import numpy as np

from rabi_vqe import HilbertConfig, RabiParams, build_hamiltonians, eigh, exact_ground_state, partial_trace_spin
from rabi_vqe.analysis import fidelity, powerlaw_fit, quadrature_stats
from rabi_vqe.model import critical_squeezing_x, squeezed_ground_state

cfg = HilbertConfig(60)  # photons 0..60, total dimension 122

# Away from the critical point (g = 0.6) the spin is frozen in |down> and the
# boson sees an effective quadratic Hamiltonian. Its ground energy is closed form.
params = RabiParams.from_g(0.1, 64.0, 0.6)
hs = build_hamiltonians(params, cfg)
e_eff = eigh(hs.H_eff)[0][0]
print(f"effective model: E0 = {e_eff:.10f}   closed form = {-0.01 - params.Omega / 2:.10f}")

# The full ground state is close to a squeezed vacuum times |down>.
gs = exact_ground_state(hs.H_full, hs.parity)
x = critical_squeezing_x(0.6)
print(f"squeeze parameter x = {x:.6f}, overlap with S(x)|0>|down> = "
      f"{fidelity(gs.state, squeezed_ground_state(params, cfg)):.6f}")

# At g = 1 the squeezing keeps growing with Omega. dQ widens, dP narrows,
# and both follow power laws in Omega.
print("\n Omega     E0            dQ        dP        dQ*dP")
omegas = 2.0 ** np.arange(2, 7)
dq, dp = [], []
for Omega in omegas:
    hs = build_hamiltonians(RabiParams.from_g(0.1, Omega, 1.0), cfg)
    gs = exact_ground_state(hs.H_full, hs.parity)
    q = quadrature_stats(partial_trace_spin(gs.state))
    dq.append(q.dq)
    dp.append(q.dp)
    print(f"{Omega:6.0f}  {gs.energy:12.6f}  {q.dq:8.5f}  {q.dp:8.5f}  {q.product:8.5f}")

for name, values in (("dQ", dq), ("dP", dp)):
    fit = powerlaw_fit(omegas, values)
    print(f"{name} ~ Omega^{fit.slope:+.4f}   (R^2 = {fit.r_squared:.5f})")
