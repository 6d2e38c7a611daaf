"""Variational preparation of critical quantum Rabi ground states."""
from .ansatz import AnsatzParams, CompiledAnsatz, apply_ansatz, compile_ansatz, initial_state
from .hilbert import HilbertConfig, build_boson_ops, eigh, partial_trace_spin, tensor
from .model import RabiParams, build_hamiltonians, exact_ground_state
from .vqe import OptimizerConfig, VqeRun, cost, depth_sweep, gradient, optimize_depth

__version__ = "0.1.0"
