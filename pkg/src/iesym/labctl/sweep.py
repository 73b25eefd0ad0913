"""Seeded parameter sweeps with per-unit files, resume and a deterministic merge.

Layout of an output directory::

    config.yaml          the validated configuration
    units/<unit>.jsonl   one raw record per (point, realization), written atomically
    data.csv             merged rows, fixed schema and order
    manifest.json        schema version, code version, seeds and unit list

A unit whose file exists is complete; re-running the same configuration
skips it.  Rows never depend on the worker count or the completion order.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from iesym import __version__, _random
from iesym.circuit import CircuitSpec, TrajectoryRecord
from iesym.labctl.config import SweepConfig, dump_config

CSV_COLUMNS = ("engine", "seed", "L", "T", "p_or_nu", "realization", "layer", "observable", "value")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Unit:
    """One engine run: a sweep point and a realization index."""

    engine: str
    L: int
    T: int
    index: int  # position of the parameter in the config's list
    value: float
    realization: int
    seed: int

    @property
    def name(self) -> str:
        return f"{self.engine}_L{self.L}_T{self.T}_x{self.index:03d}_r{self.realization:05d}"


def realization_seed(master_seed: int, L: int, T: int, realization: int) -> int:
    """Seed of a realization; independent of the swept parameter so runs at
    different p share gates and probe draws."""
    return _random.derive_seed(master_seed, _random.REALIZATION, L, T, realization)


def units(cfg: SweepConfig) -> list[Unit]:
    out = []
    for L, T in cfg.points():
        for i, v in enumerate(cfg.params):
            for r in range(cfg.realizations):
                out.append(Unit(cfg.engine, L, T, i, v, r, realization_seed(cfg.master_seed, L, T, r)))
    return out


def _circuit_rows(rec: TrajectoryRecord, unit: Unit, observables) -> list[list]:
    return [[unit.engine, unit.seed, unit.L, unit.T, unit.value, unit.realization, s.layer, s.observable, s.value]
            for s in rec.samples if s.observable in observables]


def run_unit(cfg_dict: dict, unit: Unit) -> str:
    """Run one unit and return its JSON line (raw record plus CSV rows)."""
    from iesym.labctl.config import validate

    cfg = validate(cfg_dict)
    observables = cfg.selected_observables()
    if cfg.engine in ("stab", "dense"):
        spec = CircuitSpec(L=unit.L, T=unit.T, p=unit.value, master_seed=unit.seed, **cfg.circuit)
        if cfg.engine == "stab":
            from iesym.stabcore import run_trajectory

            rec = run_trajectory(spec)
        else:
            from iesym.densequantum import run_trajectory_dense

            rec = run_trajectory_dense(spec)[1]
        payload = json.loads(rec.to_json())
        rows = _circuit_rows(rec, unit, observables)
    else:
        from iesym.pottsrbc import OBSERVABLES, RbcParams, build_lattice, run_chain

        pc = cfg.potts
        lat = build_lattice(unit.L, unit.T, periodic_time=pc["geometry"] == "torus")
        params = RbcParams(pc["h"], unit.value, sweeps=pc["sweeps"], thermalization=pc["thermalization"],
                           stride=pc["stride"], seed=unit.seed)
        res = run_chain(lat, params)
        means = {name: float(res.series(name).mean()) if res.obs.shape[0] else float("nan")
                 for name in OBSERVABLES}
        payload = {"params": params.__dict__, "geometry": pc["geometry"], "means": means,
                   "kept_sweeps": int(res.obs.shape[0])}
        rows = [[unit.engine, unit.seed, unit.L, unit.T, unit.value, unit.realization, 0, name, means[name]]
                for name in OBSERVABLES if name in observables]
    return json.dumps({"unit": unit.name, "record": payload, "rows": rows}, sort_keys=True)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None


def _format(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def merge(out: Path, all_units: list[Unit]) -> Path:
    """Concatenate unit rows into ``data.csv`` in unit order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for u in all_units:
        line = (out / "units" / f"{u.name}.jsonl").read_text()
        for row in json.loads(line)["rows"]:
            w.writerow([_format(v) for v in row])
    path = out / "data.csv"
    _write_atomic(path, buf.getvalue())
    return path


def run_sweep(cfg: SweepConfig, output_root=None, workers: int = 1, stop_after: int | None = None) -> Path:
    """Run every missing unit, then merge and write the manifest.

    Args:
        cfg: validated configuration.
        output_root: base for a relative ``cfg.output``.
        workers: process count (1 runs in-process).
        stop_after: run at most this many new units and return without
            merging (simulates an interrupted run).

    Returns:
        The output directory.
    """
    out = cfg.output_dir(output_root)
    try:
        (out / "units").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out}: {exc.strerror}") from None
    dump_config(cfg, out / "config.yaml")
    all_units = units(cfg)
    todo = [u for u in all_units if not (out / "units" / f"{u.name}.jsonl").exists()]
    if stop_after is not None:
        todo = todo[:stop_after]
    cfg_dict = cfg.to_dict()
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_unit, cfg_dict, u): u for u in todo}
            for fut, u in futures.items():
                _write_atomic(out / "units" / f"{u.name}.jsonl", fut.result() + "\n")
    else:
        for u in todo:
            _write_atomic(out / "units" / f"{u.name}.jsonl", run_unit(cfg_dict, u) + "\n")
    if stop_after is not None and any(not (out / "units" / f"{u.name}.jsonl").exists() for u in all_units):
        return out
    merge(out, all_units)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "csv_columns": list(CSV_COLUMNS),
        "code_version": __version__,
        "engine": cfg.engine,
        "master_seed": cfg.master_seed,
        "units": [{"name": u.name, "L": u.L, "T": u.T, "value": u.value, "realization": u.realization,
                   "seed": u.seed} for u in all_units],
    }
    _write_atomic(out / "manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return out
