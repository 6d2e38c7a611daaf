"""
How deep does the circuit need to be?
=====================================

Greedy depth sweeps for a few qubit splittings. Each depth starts from the
previous optimum plus an identity block, so the best energy can only go down.
Takes about a minute; pass --full for all five splittings up to p = 14.
"""
import sys

from rabi_vqe import OptimizerConfig, RabiParams, depth_sweep
from rabi_vqe.analysis import threshold_depth

full = "--full" in sys.argv
omegas = [4.0, 8.0, 16.0, 32.0, 64.0] if full else [4.0, 16.0]
p_max = 14 if full else 10

for Omega in omegas:
    runs = depth_sweep(RabiParams.from_g(0.1, Omega, 1.0), p_max, OptimizerConfig(seed=0))
    print(f"\nOmega = {Omega:g}")
    for r in runs:
        bar = "#" * max(0, int(-2 * __import__("math").log10(max(r.infidelity, 1e-16))))
        print(f"  p={r.depth:2d}  E={r.best_energy:.10f}  1-F={r.infidelity:.2e}  {bar}")
    depths = [r.depth for r in runs]
    infid = [r.infidelity for r in runs]
    print(f"  first depth with 1-F <= 1e-6: {threshold_depth(depths, infid, 1e-6)}")
    print(f"  first depth with 1-F <= 1e-8: {threshold_depth(depths, infid, 1e-8)}")
