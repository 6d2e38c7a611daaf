"""Experiment configuration: INI file format, flag overrides, hashing."""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json
import os
from dataclasses import dataclass, field

from .model import RabiParams
from .vqe import OptimizerConfig

DEFAULT_OUT = "rabi_vqe_out"
OUT_ENV = "RABI_VQE_OUT"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    omega0: float = 0.1
    omega_list: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0, 64.0)
    g: float | None = 1.0
    lam: float | None = None
    fock_cutoff: int = 60
    p_max: int = 12
    out_dir: str | None = None
    wigner_grid: str = "-8:8:201"
    jobs: int | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if (self.g is None) == (self.lam is None):
            raise ConfigError("exactly one of g and lambda must be given")
        if not self.omega_list:
            raise ConfigError("omega list is empty")
        if self.fock_cutoff < 1 or self.p_max < 1:
            raise ConfigError("cutoff and pmax must be >= 1")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def seed(self) -> int:
        return self.optimizer.seed

    def rabi_params(self, Omega: float) -> RabiParams:
        if self.g is not None:
            return RabiParams.from_g(self.omega0, Omega, self.g)
        return RabiParams(self.omega0, Omega, self.lam)

    def output_dir(self) -> str:
        return self.out_dir or os.environ.get(OUT_ENV) or DEFAULT_OUT

    def replace(self, **changes) -> "ExperimentConfig":
        opt = {k: changes.pop(k) for k in list(changes) if k in OPTIMIZER_FIELDS}
        if opt:
            changes["optimizer"] = dataclasses.replace(self.optimizer, **opt)
        if "lam" in changes and changes["lam"] is not None and "g" not in changes:
            changes["g"] = None
        if "g" in changes and changes["g"] is not None and "lam" not in changes:
            changes["lam"] = None
        try:
            return dataclasses.replace(self, **changes)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["omega_list"] = list(self.omega_list)
        return d

    def config_hash(self) -> str:
        # out_dir and jobs do not change any numbers
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("jobs")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


OPTIMIZER_FIELDS = {f.name for f in dataclasses.fields(OptimizerConfig)}


def _opt_float(text: str) -> float | None:
    text = text.strip()
    return None if text in ("", "none", "None") else float(text)


def parse_config(text: str) -> ExperimentConfig:
    """Parse INI text with ``[experiment]``, ``[optimizer]`` and ``[wigner]`` sections."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    unknown = set(parser.sections()) - {"experiment", "optimizer", "wigner"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    kwargs = {}
    try:
        if parser.has_section("experiment"):
            sec = parser["experiment"]
            known = {"omega0", "omegas", "g", "lambda", "cutoff", "pmax", "out", "jobs"}
            extra = set(sec) - known
            if extra:
                raise ConfigError(f"unknown [experiment] keys: {sorted(extra)}")
            if "omega0" in sec:
                kwargs["omega0"] = float(sec["omega0"])
            if "omegas" in sec:
                kwargs["omega_list"] = tuple(float(v) for v in sec["omegas"].split(",") if v.strip())
            if "g" in sec or "lambda" in sec:
                kwargs["g"] = _opt_float(sec.get("g", ""))
                kwargs["lam"] = _opt_float(sec.get("lambda", ""))
            if "cutoff" in sec:
                kwargs["fock_cutoff"] = int(sec["cutoff"])
            if "pmax" in sec:
                kwargs["p_max"] = int(sec["pmax"])
            if sec.get("out", "").strip():
                kwargs["out_dir"] = sec["out"].strip()
            if sec.get("jobs", "").strip():
                kwargs["jobs"] = int(sec["jobs"])
        if parser.has_section("optimizer"):
            sec = parser["optimizer"]
            extra = set(sec) - OPTIMIZER_FIELDS
            if extra:
                raise ConfigError(f"unknown [optimizer] keys: {sorted(extra)}")
            defaults = OptimizerConfig()
            opt = {}
            for key, raw in sec.items():
                kind = type(getattr(defaults, key))
                opt[key] = raw.strip() if kind is str else kind(float(raw)) if kind is int else kind(raw)
            kwargs["optimizer"] = OptimizerConfig(**opt)
        if parser.has_section("wigner"):
            sec = parser["wigner"]
            if set(sec) - {"grid"}:
                raise ConfigError(f"unknown [wigner] keys: {sorted(set(sec) - {'grid'})}")
            kwargs["wigner_grid"] = sec["grid"].strip()
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc


def serialize_config(cfg: ExperimentConfig) -> str:
    parser = configparser.ConfigParser()
    parser["experiment"] = {
        "omega0": repr(cfg.omega0),
        "omegas": ", ".join(repr(float(o)) for o in cfg.omega_list),
        "g": "" if cfg.g is None else repr(cfg.g),
        "lambda": "" if cfg.lam is None else repr(cfg.lam),
        "cutoff": str(cfg.fock_cutoff),
        "pmax": str(cfg.p_max),
        "out": cfg.out_dir or "",
        "jobs": "" if cfg.jobs is None else str(cfg.jobs),
    }
    parser["optimizer"] = {k: repr(v) if isinstance(v, float) else str(v) for k, v in dataclasses.asdict(cfg.optimizer).items()}
    parser["wigner"] = {"grid": cfg.wigner_grid}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
