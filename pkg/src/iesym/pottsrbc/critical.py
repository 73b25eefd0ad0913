"""Locating the random-cluster transition from finite-size crossings."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from iesym import scaling
from iesym.pottsrbc.lattice import build_lattice
from iesym.pottsrbc.sampler import RbcParams, binder, run_chain


def _spanning(blocks: np.ndarray) -> float:
    return float(blocks[:, 1].mean())


def _binder(blocks: np.ndarray) -> float:
    return binder(blocks)


def size_curves(h: int, sizes: Sequence[int], nu_grid: Sequence[float], sweeps: int = 20000,
                thermalization: int = 500, n_blocks: int = 50, seed: int = 0) -> dict:
    """Block-averaged observables for every size and bond probability.

    ``h = 1`` uses an ``L x L`` cylinder (open in time) and its top-bottom
    spanning events; ``h >= 2`` uses an ``L x L`` torus and magnetization
    moments.  Returns ``{L: (nu_grid, [blocks per nu])}``.
    """
    out = {}
    for L in sizes:
        samples = []
        for i, nu in enumerate(nu_grid):
            lat = build_lattice(L, L, periodic_time=h > 1)
            res = run_chain(lat, RbcParams(h, float(nu), sweeps=sweeps, thermalization=thermalization,
                                           seed=seed), stream=L * 1000 + i)
            samples.append(res.blocks(n_blocks))
        out[L] = (np.asarray(nu_grid, dtype=float), samples)
    return out


def locate_critical(h: int, sizes: Sequence[int], nu_grid: Sequence[float], sweeps: int = 20000,
                    thermalization: int = 500, n_blocks: int = 50, n_boot: int = 1000,
                    seed: int = 0) -> scaling.CrossingResult:
    """Crossing of spanning probability (``h = 1``) or Binder cumulant (``h >= 2``).

    The error is a bootstrap over block means.  Raises
    :class:`iesym.scaling.OutOfRange` if no pair of curves crosses inside the grid.
    """
    if len(sizes) < 3:
        raise ValueError("sizes: need at least 3 sizes")
    curves = size_curves(h, sizes, nu_grid, sweeps, thermalization, n_blocks, seed)
    est = _spanning if h == 1 else _binder
    res = scaling.crossing(curves, est, n_boot=n_boot, seed=seed)
    if not res.in_range:
        raise scaling.OutOfRange(f"no crossing for h={h} in [{nu_grid[0]}, {nu_grid[-1]}]")
    return res
