"""Command-line driver: ground truth export, single VQE runs, sweeps, Wigner grids.

Every file written here starts with a header carrying the package version,
the configuration hash and the seed. CSV headers are ``#`` comment lines,
JSON documents carry a ``header`` object. Writes go to a temporary file in the
target directory and are renamed into place.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import __version__
from .analysis import (
    block_trace_report,
    fock_distribution,
    parse_grid,
    powerlaw_fit,
    quadrature_stats,
    saturation_depth,
    threshold_depth,
    wigner,
)
from .ansatz import ODD, apply_ansatz, compile_ansatz, initial_state
from .config import ConfigError, ExperimentConfig, load_config
from .hilbert import HilbertConfig, partial_trace_spin
from .model import build_hamiltonians, exact_ground_state, parity_operator
from .optimize import NonFiniteCost
from .vqe import VqeRun, depth_sweep

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

THRESHOLDS = (1e-6, 1e-8)

# Column layouts. Changing any of these is a schema change; tests/golden guards them.
GROUND_TRUTH_COLUMNS = ("omega0", "Omega", "lambda", "g", "N", "ground_energy",
                        "dq", "dp", "product", "parity", "fock_file")
FOCK_COLUMNS = ("n", "probability")
FIDELITY_COLUMNS = ("Omega", "p", "energy", "infidelity", "status")
SCALING_COLUMNS = ("Omega", "p", "dq", "dp", "product", "ed_dq", "ed_dp", "infidelity")
TRACE_BASE_COLUMNS = ("block", "dq", "dp", "product", "parity", "norm")

SCHEMA = {
    "ground_truth.csv": {
        "omega0": "boson frequency",
        "Omega": "qubit splitting",
        "lambda": "coupling strength",
        "g": "dimensionless coupling 2*lambda/sqrt(omega0*Omega)",
        "N": "Fock cutoff",
        "ground_energy": "lowest eigenvalue of the truncated Hamiltonian",
        "dq": "quadrature deviation of Q in the exact ground state",
        "dp": "quadrature deviation of P in the exact ground state",
        "product": "dq*dp",
        "parity": "parity expectation of the exact ground state",
        "fock_file": "file name of the photon-number distribution for this row",
    },
    "fock_Omega<Omega>.csv": {
        "n": "photon number",
        "probability": "boson reduced-state population of |n>",
    },
    "fidelity_vs_depth.csv": {
        "Omega": "qubit splitting",
        "p": "circuit depth",
        "energy": "best variational energy at this depth",
        "infidelity": "1 - |<exact|circuit>|^2",
        "status": "ok, or the failure reason for this point",
    },
    "scaling.csv": {
        "Omega": "qubit splitting",
        "p": "depth of the final circuit",
        "dq": "quadrature deviation of Q in the final circuit state",
        "dp": "quadrature deviation of P in the final circuit state",
        "product": "dq*dp",
        "ed_dq": "dq of the exact ground state",
        "ed_dp": "dp of the exact ground state",
        "infidelity": "infidelity of the final circuit state",
    },
    "block_trace_Omega<Omega>_p<p>.csv": {
        "block": "0 for the initial state, j after the j-th block",
        "dq": "quadrature deviation of Q",
        "dp": "quadrature deviation of P",
        "product": "dq*dp",
        "parity": "parity expectation",
        "norm": "state norm",
        "P<n>": "photon-number population, one column per n = 0..N",
    },
    "sweep_Omega<Omega>.json": {
        "runs": "per depth: p, energy, infidelity, dq, dp, thetas (p x 3 rows of alpha, beta, gamma), restarts",
        "ed_dq, ed_dp": "exact ground-state deviations",
        "status": "ok, or the failure reason",
    },
    "wigner_*.csv": {
        "first row": "blank corner cell, then the p axis",
        "other rows": "q value, then W(q, p) along the p axis",
    },
}


class OutputError(OSError):
    pass


# ---------------------------------------------------------------- writing

def _header_lines(cfg: ExperimentConfig) -> list[str]:
    return [f"rabi_vqe {__version__}", f"config_hash: {cfg.config_hash()}", f"seed: {cfg.seed}"]


def header_dict(cfg: ExperimentConfig) -> dict:
    config = cfg.to_dict()
    for key in ("out_dir", "jobs"):  # location and pool size never change the numbers
        config.pop(key)
    return {"version": __version__, "config_hash": cfg.config_hash(), "seed": cfg.seed,
            "config": config}


def atomic_write(path: str, text: str) -> str:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, cfg: ExperimentConfig, columns, rows) -> str:
    buf = io.StringIO()
    for line in _header_lines(cfg):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return atomic_write(path, buf.getvalue())


def write_json(path: str, cfg: ExperimentConfig, payload: dict) -> str:
    doc = {"header": header_dict(cfg), **payload}
    return atomic_write(path, json.dumps(doc, indent=1, sort_keys=False) + "\n")


def read_csv(path: str) -> tuple[list[str], list[str], list[list[str]]]:
    """Return (header comment lines, column names, rows as strings)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    header = [ln[2:] for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.reader(body))
    return header, rows[0], rows[1:]


def write_wigner_csv(path: str, cfg: ExperimentConfig, grid) -> str:
    rows = [["", *grid.p_axis]]
    rows += [[q, *vals] for q, vals in zip(grid.q_axis, grid.values)]
    buf = io.StringIO()
    for line in _header_lines(cfg):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return atomic_write(path, buf.getvalue())


def _tag(Omega: float) -> str:
    return f"{Omega:g}"


# ---------------------------------------------------------------- commands

def cmd_ground_truth(cfg: ExperimentConfig) -> list[str]:
    out = cfg.output_dir()
    hilbert = HilbertConfig(cfg.fock_cutoff)
    rows, written = [], []
    for Omega in cfg.omega_list:
        params = cfg.rabi_params(Omega)
        hs = build_hamiltonians(params, hilbert)
        gs = exact_ground_state(hs.H_full, hs.parity)
        rho_b = partial_trace_spin(gs.state)
        quad = quadrature_stats(rho_b)
        fock_name = f"fock_Omega{_tag(Omega)}.csv"
        dist = fock_distribution(rho_b)
        written.append(write_csv(os.path.join(out, fock_name), cfg, FOCK_COLUMNS, enumerate(dist)))
        rows.append((cfg.omega0, Omega, params.lam, params.g, cfg.fock_cutoff, gs.energy,
                     quad.dq, quad.dp, quad.product, gs.parity, fock_name))
    written.append(write_csv(os.path.join(out, "ground_truth.csv"), cfg, GROUND_TRUTH_COLUMNS, rows))
    return written


def run_payload(run: VqeRun, params, Omega: float) -> dict:
    return {
        "params": {"omega0": params.omega0, "Omega": Omega, "lambda": params.lam, "g": params.g},
        "status": "ok",
        "depth": run.depth,
        "best_energy": run.best_energy,
        "exact_energy": run.exact_energy,
        "fidelity": run.fidelity,
        "infidelity": run.infidelity,
        "thetas": run.best_thetas.thetas.tolist(),
        "energy_history": list(map(float, run.energy_history)),
        "seed": run.seed,
        "best_restart": run.best_restart,
        "restarts": [asdict(r) for r in run.restarts],
        "wall_time": run.wall_time,
    }


def _block_trace(cfg: ExperimentConfig, run: VqeRun, grid_spec: str | None):
    hilbert = HilbertConfig(cfg.fock_cutoff)
    compiled = compile_ansatz(hilbert)
    psi0 = initial_state(hilbert)
    out = apply_ansatz(compiled, run.best_thetas, psi0, capture_blocks=True)
    states = [psi0, *out.blocks]
    axis = parse_grid(grid_spec) if grid_spec else None
    reports = block_trace_report(states, parity_operator(hilbert), axis, axis,
                                 with_wigner=grid_spec is not None)
    return out.final, reports


def cmd_vqe(cfg: ExperimentConfig, Omega: float, p: int, capture_blocks: bool = False) -> list[str]:
    """Optimize depths 1..p with warm starts and export the depth-p circuit."""
    out = cfg.output_dir()
    params = cfg.rabi_params(Omega)
    stem = f"Omega{_tag(Omega)}_p{p}"
    run_path = os.path.join(out, f"run_{stem}.json")
    try:
        runs = depth_sweep(params, p, cfg.optimizer, HilbertConfig(cfg.fock_cutoff), ODD)
    except (NonFiniteCost, FloatingPointError, np.linalg.LinAlgError) as exc:
        write_json(run_path, cfg, {"status": "failed", "reason": f"{type(exc).__name__}: {exc}",
                                   "params": {"omega0": params.omega0, "Omega": Omega,
                                              "lambda": params.lam, "g": params.g},
                                   "depth": p})
        raise
    run = runs[-1]
    final, reports = _block_trace(cfg, run, cfg.wigner_grid if capture_blocks else None)
    payload = run_payload(run, params, Omega)
    payload["final_state"] = {"re": final.real.tolist(), "im": final.imag.tolist()}
    written = [write_json(run_path, cfg, payload)]
    n_cols = [f"P{n}" for n in range(cfg.fock_cutoff + 1)]
    rows = [(r.block, r.quad.dq, r.quad.dp, r.quad.product, r.parity, r.norm, *r.fock) for r in reports]
    written.append(write_csv(os.path.join(out, f"block_trace_{stem}.csv"), cfg,
                             (*TRACE_BASE_COLUMNS, *n_cols), rows))
    if capture_blocks:
        for r in reports:
            written.append(write_wigner_csv(
                os.path.join(out, f"wigner_{stem}_block{r.block}.csv"), cfg, r.wigner))
    return written


def sweep_point(cfg: ExperimentConfig, Omega: float) -> dict:
    """One independent sweep point; failures are reported, not raised."""
    params = cfg.rabi_params(Omega)
    hilbert = HilbertConfig(cfg.fock_cutoff)
    hs = build_hamiltonians(params, hilbert)
    gs = exact_ground_state(hs.H_full, hs.parity)
    ed = quadrature_stats(partial_trace_spin(gs.state))
    result = {"Omega": Omega, "ed_dq": ed.dq, "ed_dp": ed.dp, "runs": [], "status": "ok"}
    try:
        runs = depth_sweep(params, cfg.p_max, cfg.optimizer, hilbert, ODD)
    except (NonFiniteCost, FloatingPointError, np.linalg.LinAlgError) as exc:
        result["status"] = f"failed: {type(exc).__name__}: {exc}"
        return result
    compiled = compile_ansatz(hilbert)
    psi0 = initial_state(hilbert)
    for run in runs:
        final = apply_ansatz(compiled, run.best_thetas, psi0).final
        q = quadrature_stats(partial_trace_spin(final))
        result["runs"].append({"p": run.depth, "energy": run.best_energy,
                               "infidelity": run.infidelity, "dq": q.dq, "dp": q.dp,
                               "thetas": run.best_thetas.thetas.tolist(),
                               "best_restart": run.best_restart,
                               "restarts": [asdict(r) for r in run.restarts]})
    return result


def _map_points(cfg: ExperimentConfig):
    jobs = cfg.jobs or os.cpu_count() or 1
    jobs = min(jobs, len(cfg.omega_list))
    if jobs == 1:
        return [sweep_point(cfg, om) for om in cfg.omega_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(sweep_point, [cfg] * len(cfg.omega_list), cfg.omega_list))


def summarize_sweep(points: list[dict]) -> dict:
    ok = [pt for pt in points if pt["runs"]]
    summary = {"thresholds": {}, "saturation_depth_dp": {}, "failures": {}}
    for pt in points:
        if pt["status"] != "ok":
            summary["failures"][_tag(pt["Omega"])] = pt["status"]
    for pt in ok:
        depths = [r["p"] for r in pt["runs"]]
        inf = [r["infidelity"] for r in pt["runs"]]
        summary["thresholds"][_tag(pt["Omega"])] = {
            f"{t:g}": threshold_depth(depths, inf, t) for t in THRESHOLDS}
        summary["saturation_depth_dp"][_tag(pt["Omega"])] = saturation_depth(
            depths, [r["dp"] for r in pt["runs"]])
    fits = {}
    if len(ok) >= 3:
        omegas = [pt["Omega"] for pt in ok]
        for label, values in (
            ("vqe_dq", [pt["runs"][-1]["dq"] for pt in ok]),
            ("vqe_dp", [pt["runs"][-1]["dp"] for pt in ok]),
            ("ed_dq", [pt["ed_dq"] for pt in ok]),
            ("ed_dp", [pt["ed_dp"] for pt in ok]),
        ):
            fit = powerlaw_fit(omegas, values)
            fits[label] = {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared}
    summary["fits"] = fits
    return summary


def cmd_sweep(cfg: ExperimentConfig) -> list[str]:
    out = cfg.output_dir()
    points = _map_points(cfg)
    fid_rows, scale_rows = [], []
    for pt in points:
        if not pt["runs"]:
            fid_rows.append((pt["Omega"], "", "", "", pt["status"]))
            continue
        for r in pt["runs"]:
            fid_rows.append((pt["Omega"], r["p"], r["energy"], r["infidelity"], "ok"))
        last = pt["runs"][-1]
        scale_rows.append((pt["Omega"], last["p"], last["dq"], last["dp"], last["dq"] * last["dp"],
                           pt["ed_dq"], pt["ed_dp"], last["infidelity"]))
    per_point = [
        write_json(os.path.join(out, f"sweep_Omega{_tag(pt['Omega'])}.json"), cfg, pt) for pt in points
    ]
    return per_point + [
        write_csv(os.path.join(out, "fidelity_vs_depth.csv"), cfg, FIDELITY_COLUMNS, fid_rows),
        write_csv(os.path.join(out, "scaling.csv"), cfg, SCALING_COLUMNS, scale_rows),
        write_json(os.path.join(out, "fits.json"), cfg, summarize_sweep(points)),
        write_json(os.path.join(out, "schema.json"), cfg, {"columns": SCHEMA}),
    ]


def load_run_state(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if "final_state" not in doc:
        raise ConfigError(f"{path} has no final_state (status: {doc.get('status')})")
    fs = doc["final_state"]
    return np.asarray(fs["re"]) + 1j * np.asarray(fs["im"])


def cmd_wigner(cfg: ExperimentConfig, run_path: str) -> list[str]:
    state = load_run_state(run_path)
    axis = parse_grid(cfg.wigner_grid)
    grid = wigner(partial_trace_spin(state), axis, axis)
    stem = os.path.splitext(os.path.basename(run_path))[0]
    return [write_wigner_csv(os.path.join(cfg.output_dir(), f"wigner_{stem}.csv"), cfg, grid)]


# ---------------------------------------------------------------- argparse

class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1); 2 is reserved for numerics."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI experiment file")
    common.add_argument("--omega0", type=float)
    common.add_argument("--omega", type=float, action="append",
                        help="qubit splitting; repeat for a list")
    coupling = common.add_mutually_exclusive_group()
    coupling.add_argument("--g", type=float)
    coupling.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--cutoff", type=int, help="Fock cutoff N")
    common.add_argument("--depth", type=int, help="circuit depth for the vqe command")
    common.add_argument("--pmax", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--restarts", type=int)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--jobs", type=int, metavar="K")
    common.add_argument("--capture-blocks", action="store_true")
    common.add_argument("--wigner-grid", metavar="QMIN:QMAX:NPTS")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="rabi-vqe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("ground-truth", parents=[common], help="exact ground states per Omega")
    sub.add_parser("vqe", parents=[common], help="single depth run with block trace")
    sub.add_parser("sweep", parents=[common], help="depth sweep over every Omega")
    w = sub.add_parser("wigner", parents=[common], help="Wigner grid for a stored run")
    w.add_argument("run", metavar="RUN_JSON")
    sub.add_parser("version", help="print the version")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.omega0 is not None:
        changes["omega0"] = args.omega0
    if args.omega:
        changes["omega_list"] = tuple(args.omega)
    if args.g is not None:
        changes["g"] = args.g
    if args.lam is not None:
        changes["lam"] = args.lam
    for flag, name in (("cutoff", "fock_cutoff"), ("pmax", "p_max"), ("out", "out_dir"),
                       ("jobs", "jobs"), ("wigner_grid", "wigner_grid"),
                       ("seed", "seed"), ("restarts", "restarts")):
        value = getattr(args, flag)
        if value is not None:
            changes[name] = value
    cfg = cfg.replace(**changes) if changes else cfg
    try:
        parse_grid(cfg.wigner_grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    if args.command == "version":
        print(f"rabi_vqe {__version__}")
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "ground-truth":
            written = cmd_ground_truth(cfg)
        elif args.command == "vqe":
            if len(cfg.omega_list) != 1 and not args.omega:
                raise ConfigError("vqe needs a single --omega")
            written = cmd_vqe(cfg, cfg.omega_list[0], args.depth or cfg.p_max, args.capture_blocks)
        elif args.command == "sweep":
            written = cmd_sweep(cfg)
        else:
            written = cmd_wigner(cfg, args.run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
