"""Ensemble statistics and finite-size crossing analysis of sweep datasets."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from iesym import scaling
from iesym.labctl.sweep import CSV_COLUMNS


def load_dataset(path: str | os.PathLike) -> pd.DataFrame:
    """Read ``data.csv`` (a file or a sweep directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / "data.csv"
    try:
        df = pd.read_csv(path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read {path}: {exc.strerror}") from None
    if tuple(df.columns) != CSV_COLUMNS:
        raise ValueError(f"{path}: columns {tuple(df.columns)} differ from {CSV_COLUMNS}")
    return df


def ensemble_stats(df: pd.DataFrame, groupby) -> tuple[pd.DataFrame, list[str]]:
    """Per-group mean, standard error over realizations, and count.

    Rows of one realization inside a group (several layers, say) are averaged
    first, so the error is realization-level.  Groups whose values are all
    missing are omitted and listed in the returned warnings.
    """
    if df.empty:
        raise ValueError("empty dataset")
    groupby = [groupby] if isinstance(groupby, str) else list(groupby)
    keys = groupby + [c for c in ("engine", "seed", "realization") if c not in groupby]
    per_real = df.groupby(keys, sort=True, dropna=False)["value"].mean().reset_index()
    rows, warnings = [], []
    for key, g in per_real.groupby(groupby, sort=True):
        v = g["value"].dropna().to_numpy(dtype=float)
        if v.size == 0:
            warnings.append(f"group {key!r} has no values; omitted")
            continue
        se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
        key = key if isinstance(key, tuple) else (key,)
        rows.append(dict(zip(groupby, key), mean=float(v.mean()), stderr=se, count=int(v.size)))
    return pd.DataFrame(rows, columns=groupby + ["mean", "stderr", "count"]), warnings


@dataclass
class CrossingReport:
    """Crossing analysis of one observable.

    Attributes:
        observable: analysed observable.
        in_range: whether any pair of size curves crossed inside the swept range.
        p_c: median pairwise crossing (``None`` when out of range).
        p_c_err: bootstrap standard deviation.
        spread: half-width of the central 68% bootstrap interval.
        pairwise: ``{(L1, L2): crossing}``.
        exponent, exponent_ci, collapse_p_c, objective: data-collapse fit
            (``None`` when not requested or not converged).
        sizes: sizes used.
        x_range: swept interval.
        source: dataset reference.
    """

    observable: str
    in_range: bool
    p_c: float | None
    p_c_err: float
    spread: float
    pairwise: dict
    sizes: tuple
    x_range: tuple
    exponent: float | None = None
    exponent_ci: tuple = (np.nan, np.nan)
    collapse_p_c: float | None = None
    objective: float | None = None
    source: str = ""
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["pairwise"] = {f"{a}-{b}": v for (a, b), v in self.pairwise.items()}
        return d


def size_curves(df: pd.DataFrame, observable: str, sizes=None, layer: str | int = "final") -> dict:
    """``{L: (x, [per-realization values])}`` for one observable.

    ``layer="final"`` takes each trajectory's last recorded layer (``T``).
    """
    d = df[df["observable"] == observable]
    if layer == "final":
        d = d[d["layer"] == d["T"]] if (d["layer"] == d["T"]).any() else d
    elif layer is not None:
        d = d[d["layer"] == int(layer)]
    sizes = sorted(d["L"].unique()) if sizes is None else sorted(sizes)
    curves = {}
    for L in sizes:
        dl = d[d["L"] == L]
        xs = np.sort(dl["p_or_nu"].unique())
        samples = []
        for x in xs:
            g = dl[dl["p_or_nu"] == x].sort_values(["seed", "realization"])
            samples.append(g["value"].to_numpy(dtype=float))
        curves[int(L)] = (xs, samples)
    return curves


def crossing_analysis(df: pd.DataFrame, observable: str, sizes=None, layer: str | int = "final",
                      n_boot: int = 1000, seed: int = 0, collapse: bool = False,
                      source: str = "") -> CrossingReport:
    """Pairwise crossings of size curves with a bootstrap error, and an optional collapse.

    Needs at least 3 sizes and 5 parameter points.  When no pair of curves
    crosses the report is marked out of range and carries no ``p_c``.
    """
    curves = size_curves(df, observable, sizes, layer)
    if len(curves) < 3:
        raise ValueError(f"sizes: need at least 3 sizes, got {sorted(curves)}")
    grids = [tuple(v[0]) for v in curves.values()]
    common = sorted(set(grids[0]).intersection(*grids[1:]))
    if len(common) < 5:
        raise ValueError(f"need at least 5 common parameter points, got {len(common)}")
    aligned = {}
    for L, (xs, samples) in curves.items():
        keep = [i for i, x in enumerate(xs) if x in set(common)]
        aligned[L] = (np.asarray(common), [samples[i] for i in keep])
    res = scaling.crossing(aligned, n_boot=n_boot, seed=seed)
    rep = CrossingReport(observable, res.in_range, res.estimate, res.error, res.spread, res.pairwise,
                         tuple(sorted(aligned)), res.x_range, source=source)
    if not res.in_range:
        rep.notes.append("no crossing inside the swept range")
        return rep
    if collapse:
        x, y, L, s = [], [], [], []
        for size, (xs, samples) in aligned.items():
            for xv, sv in zip(xs, samples):
                x.append(xv)
                y.append(sv.mean())
                L.append(size)
                s.append(max(sv.std(ddof=1) / np.sqrt(sv.size), 1e-3) if sv.size > 1 else 1.0)
        try:
            fit = scaling.data_collapse(x, y, L, s, x_c0=res.estimate)
            rep.exponent, rep.collapse_p_c, rep.objective = fit.inv_nu, fit.x_c, fit.objective
        except scaling.OutOfRange as exc:
            rep.notes.append(str(exc))
    return rep
