"""Sweep configuration files (YAML).

Schema (defaults in parentheses)::

    engine: stab | dense | potts
    master_seed: int (0)
    realizations: int >= 1 (1)
    sizes: [L, ...]
    times: [T, ...] or null (null: T = time_factor * L per size)
    time_factor: int (2)
    params: [p or nu, ...]
    observables: [name, ...] or null (all)
    output: relative or absolute directory ("sweep")
    circuit:            # stab / dense engines, CircuitSpec fields
      initial_system, apparatus_init, environment_init, probe, gate_family,
      e_sites, gap, p_sites, stride
    potts:              # potts engine
      h (2), sweeps (2000), thermalization (200), stride (1),
      geometry: torus | cylinder (torus)

Relative ``output`` paths resolve against the output root: the
``IESYM_OUTPUT_ROOT`` environment variable, else the working directory.
"""

from __future__ import annotations

import copy
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from iesym.circuit import CircuitSpec, SpecError

OUTPUT_ROOT_ENV = "IESYM_OUTPUT_ROOT"
ENGINES = ("stab", "dense", "potts")
_TOP_KEYS = {"engine", "master_seed", "realizations", "sizes", "times", "time_factor", "params",
             "observables", "output", "circuit", "potts"}
_CIRCUIT_KEYS = {"initial_system", "apparatus_init", "environment_init", "probe", "gate_family",
                 "e_sites", "gap", "p_sites", "stride"}
_POTTS_DEFAULTS = {"h": 2, "sweeps": 2000, "thermalization": 200, "stride": 1, "geometry": "torus"}
CIRCUIT_OBSERVABLES = ("O", "C", "S_cond")
POTTS_OBSERVABLES = ("largest_cluster", "spanning", "m2", "m4", "bond_density")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class SweepConfig:
    engine: str
    sizes: list
    params: list
    master_seed: int = 0
    realizations: int = 1
    times: list | None = None
    time_factor: int = 2
    observables: list | None = None
    output: str = "sweep"
    circuit: dict = field(default_factory=dict)
    potts: dict = field(default_factory=dict)

    def points(self) -> list[tuple[int, int]]:
        """``(L, T)`` pairs in sweep order."""
        if self.times is None:
            return [(L, self.time_factor * L) for L in self.sizes]
        return [(L, T) for L in self.sizes for T in self.times]

    def output_dir(self, root: str | os.PathLike | None = None) -> Path:
        out = Path(self.output)
        if out.is_absolute():
            return out
        base = Path(root) if root is not None else Path(os.environ.get(OUTPUT_ROOT_ENV, "."))
        return base / out

    def to_dict(self) -> dict:
        return copy.deepcopy(asdict(self))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def selected_observables(self) -> tuple:
        allowed = POTTS_OBSERVABLES if self.engine == "potts" else CIRCUIT_OBSERVABLES
        return tuple(self.observables) if self.observables else allowed


def _int(key, v, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(key, f"must be >= {lo}, got {v}")
    return v


def _list(key, v):
    if not isinstance(v, list) or not v:
        raise ConfigError(key, f"expected a non-empty list, got {v!r}")
    return v


def validate(raw: dict) -> SweepConfig:
    """Check a raw mapping and apply defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    for key in ("engine", "sizes", "params"):
        if key not in raw:
            raise ConfigError(key, "missing required key")
    engine = raw["engine"]
    if engine not in ENGINES:
        raise ConfigError("engine", f"must be one of {ENGINES}, got {engine!r}")
    sizes = [_int("sizes", L, 2) for L in _list("sizes", raw["sizes"])]
    params = []
    name = "nu" if engine == "potts" else "p"
    for v in _list("params", raw["params"]):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(name, f"expected a number, got {v!r}")
        if not 0.0 <= v <= 1.0:
            raise ConfigError(name, f"must lie in [0, 1], got {v}")
        params.append(float(v))
    times = raw.get("times")
    if times is not None:
        times = [_int("times", T, 0 if engine != "potts" else 1) for T in _list("times", times)]
    cfg = SweepConfig(
        engine=engine, sizes=sizes, params=params,
        master_seed=_int("master_seed", raw.get("master_seed", 0)),
        realizations=_int("realizations", raw.get("realizations", 1), 1),
        times=times, time_factor=_int("time_factor", raw.get("time_factor", 2), 1),
        observables=raw.get("observables"), output=str(raw.get("output", "sweep")),
    )
    circuit = raw.get("circuit") or {}
    potts = raw.get("potts") or {}
    if not isinstance(circuit, dict):
        raise ConfigError("circuit", "expected a mapping")
    if not isinstance(potts, dict):
        raise ConfigError("potts", "expected a mapping")
    if engine == "potts":
        if circuit:
            raise ConfigError("circuit", "not used by the potts engine")
        unknown = set(potts) - set(_POTTS_DEFAULTS)
        if unknown:
            raise ConfigError(f"potts.{sorted(unknown)[0]}", "unknown key")
        merged = dict(_POTTS_DEFAULTS, **potts)
        merged["h"] = _int("potts.h", merged["h"], 1)
        for k in ("sweeps", "thermalization"):
            merged[k] = _int(f"potts.{k}", merged[k], 0)
        merged["stride"] = _int("potts.stride", merged["stride"], 1)
        if merged["geometry"] not in ("torus", "cylinder"):
            raise ConfigError("potts.geometry", f"must be torus or cylinder, got {merged['geometry']!r}")
        for L in sizes:
            if L % 2:
                raise ConfigError("sizes", f"potts lattices need even L, got {L}")
        if merged["geometry"] == "torus":
            for L, T in cfg.points():
                if T % 2:
                    raise ConfigError("times", f"torus geometry needs even T, got {T}")
        cfg.potts = merged
    else:
        if potts:
            raise ConfigError("potts", "only used by the potts engine")
        unknown = set(circuit) - _CIRCUIT_KEYS
        if unknown:
            raise ConfigError(f"circuit.{sorted(unknown)[0]}", "unknown key")
        cfg.circuit = dict(circuit)
        for (L, T) in cfg.points():
            try:
                spec = CircuitSpec(L=L, T=T, p=params[0], master_seed=cfg.master_seed, **circuit)
                if spec.initial_system == "pure_zero":
                    spec.partition()
            except SpecError as exc:
                key = str(exc).split(":")[0]
                raise ConfigError(f"circuit.{key}" if key in _CIRCUIT_KEYS else key, str(exc)) from None
            except TypeError as exc:
                raise ConfigError("circuit", str(exc)) from None
            if engine == "stab" and (L % 2 or spec.gate_family != "clifford2_uniform"):
                raise ConfigError("sizes" if L % 2 else "circuit.gate_family",
                                  "stab engine needs even L and clifford2_uniform gates")
    if cfg.observables is not None:
        allowed = POTTS_OBSERVABLES if engine == "potts" else CIRCUIT_OBSERVABLES
        obs = _list("observables", cfg.observables)
        for o in obs:
            if o not in allowed:
                raise ConfigError("observables", f"unknown observable {o!r}; allowed {allowed}")
    return cfg


def parse_config(path: str | os.PathLike) -> SweepConfig:
    """Read and validate a YAML sweep configuration."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"invalid YAML in {path}: {exc}") from None
    return validate(raw)


def dump_config(cfg: SweepConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(cfg.to_yaml())
