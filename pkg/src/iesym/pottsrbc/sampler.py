"""Swendsen-Wang dynamics of the Edwards-Sokal coupled spin-bond model.

Weight of a configuration: ``prod_edges [(1 - nu) [bond absent] + nu [bond present] delta(s_u, s_v)]``.
A bond being *present* means no probe event occurred in that slot; the
circuit convention marks probe events with ``eta = 1``, so ``eta = 1 - bond``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from iesym import _random
from iesym.pottsrbc.lattice import RbcLattice


class InvariantViolation(RuntimeError):
    """A cluster joined two different fixed spins."""


@dataclass(frozen=True)
class RbcParams:
    """Chain parameters.

    Attributes:
        h: number of spin states (cluster weight); 1 is bond percolation.
        nu: bond probability.
        sweeps: measured sweeps.
        thermalization: discarded sweeps.
        stride: keep every ``stride``-th measured sweep.
        seed: master seed of the chain.
    """

    h: int
    nu: float
    sweeps: int = 1000
    thermalization: int = 100
    stride: int = 1
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.h, (int, np.integer)) or self.h < 1:
            raise ValueError(f"h: must be an integer >= 1, got {self.h!r}")
        if not 0.0 <= float(self.nu) <= 1.0:
            raise ValueError(f"nu: must lie in [0, 1], got {self.nu!r}")
        for name in ("sweeps", "thermalization"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name}: must be non-negative")
        if self.stride < 1:
            raise ValueError("stride: must be >= 1")


@nb.njit(cache=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@nb.njit(cache=True)
def _seed(s):
    np.random.seed(s)


@nb.njit(cache=True)
def _sweep(edges, fixed, spins, bonds, nu, h, parent, root_spin):
    """One update; returns 1 on a fixed-spin conflict."""
    n = spins.size
    for i in range(n):
        parent[i] = i
    for e in range(edges.shape[0]):
        u = edges[e, 0]
        v = edges[e, 1]
        if spins[u] == spins[v] and np.random.random() < nu:
            bonds[e] = 1
            ru = _find(parent, u)
            rv = _find(parent, v)
            if ru != rv:
                if ru < rv:
                    parent[rv] = ru
                else:
                    parent[ru] = rv
        else:
            bonds[e] = 0
    for i in range(n):
        root_spin[i] = -1
    for i in range(n):
        if fixed[i] >= 0:
            r = _find(parent, i)
            if root_spin[r] >= 0 and root_spin[r] != fixed[i]:
                return 1
            root_spin[r] = fixed[i]
    for i in range(n):
        r = _find(parent, i)
        if root_spin[r] < 0:
            root_spin[r] = np.random.randint(h)
        spins[i] = root_spin[r]
    return 0


@nb.njit(cache=True)
def _measure(spins, bonds, parent, bulk, row, T, h, out):
    """Fill ``out`` = [largest fraction, spanning, m2, m4, bond density]."""
    n = spins.size
    size = np.zeros(n, dtype=np.int64)
    top = np.zeros(n, dtype=np.uint8)
    bot = np.zeros(n, dtype=np.uint8)
    counts = np.zeros(h, dtype=np.int64)
    nb_ = 0
    for i in range(n):
        if not bulk[i]:
            continue
        nb_ += 1
        r = _find(parent, i)
        size[r] += 1
        if row[i] == 0:
            top[r] = 1
        if row[i] == T - 1:
            bot[r] = 1
        counts[spins[i]] += 1
    big = 0
    span = 0
    for i in range(n):
        if size[i] > big:
            big = size[i]
        if top[i] and bot[i]:
            span = 1
    out[0] = big / nb_
    out[1] = span
    if h > 1:
        s = 0.0
        for a in range(h):
            f = counts[a] / nb_
            s += f * f
        m2 = (h * s - 1.0) / (h - 1.0)
    else:
        m2 = 1.0
    out[2] = m2
    out[3] = m2 * m2
    out[4] = bonds.mean() if bonds.size else 0.0


@nb.njit(cache=True)
def _run(edges, fixed, spins, bonds, nu, h, bulk, row, T, therm, sweeps, stride, codes_on, free_idx):
    n = spins.size
    parent = np.empty(n, dtype=np.int64)
    root_spin = np.empty(n, dtype=np.int64)
    n_keep = sweeps // stride
    obs = np.zeros((n_keep, 5))
    codes = np.zeros(n_keep if codes_on else 0, dtype=np.int64)
    buf = np.zeros(5)
    for _ in range(therm):
        if _sweep(edges, fixed, spins, bonds, nu, h, parent, root_spin):
            return obs, codes, 1
    k = 0
    for s in range(sweeps):
        if _sweep(edges, fixed, spins, bonds, nu, h, parent, root_spin):
            return obs, codes, 1
        if (s + 1) % stride == 0 and k < n_keep:
            _measure(spins, bonds, parent, bulk, row, T, h, buf)
            obs[k, :] = buf
            if codes_on:
                c = 0
                for j in range(free_idx.size):
                    c = c * h + spins[free_idx[j]]
                for e in range(bonds.size):
                    c = c * 2 + bonds[e]
                codes[k] = c
            k += 1
    return obs, codes, 0


OBSERVABLES = ("largest_cluster", "spanning", "m2", "m4", "bond_density")


@dataclass
class ChainResult:
    """Per-kept-sweep observables (columns as in :data:`OBSERVABLES`)."""

    params: RbcParams
    obs: np.ndarray
    codes: np.ndarray

    def series(self, name: str) -> np.ndarray:
        return self.obs[:, OBSERVABLES.index(name)]

    def mean(self, name: str) -> float:
        return float(self.series(name).mean())

    def binder(self) -> float:
        """``1 - <m^4> / (3 <m^2>^2)``."""
        return binder(self.obs)

    def blocks(self, n_blocks: int) -> np.ndarray:
        """Block means of the observables, shape ``(n_blocks, 5)``."""
        k = self.obs.shape[0] // n_blocks
        if k == 0:
            raise ValueError("fewer samples than blocks")
        return self.obs[: k * n_blocks].reshape(n_blocks, k, -1).mean(axis=1)


def binder(obs: np.ndarray) -> float:
    m2 = obs[:, 2].mean()
    m4 = obs[:, 3].mean()
    return float(1.0 - m4 / (3.0 * m2 * m2)) if m2 > 0 else 0.0


def _prepare(lattice: RbcLattice, h: int) -> np.ndarray:
    fixed = lattice.fixed.copy()
    if h == 1:
        fixed[fixed >= 0] = 0  # boundary types coincide for a single state
    elif fixed.max(initial=-1) >= h:
        raise ValueError(f"fixed spin {fixed.max()} needs h > {fixed.max()}")
    return fixed


def run_chain(lattice: RbcLattice, params: RbcParams, record_states: bool = False, stream: int = 0) -> ChainResult:
    """Thermalize and measure; mutates ``lattice.spins`` and ``lattice.bonds``.

    With ``record_states`` each kept sweep also stores an integer code of the
    free spins (base ``h``, vertex order) followed by the bonds (bits, edge
    order); see :func:`iesym.pottsrbc.exact.state_code`.  ``stream`` selects
    an independent random stream for the same seed.
    """
    fixed = _prepare(lattice, params.h)
    spins = np.where(fixed >= 0, fixed, np.minimum(lattice.spins, params.h - 1)).astype(np.int64)
    bonds = lattice.bonds.astype(np.int8)
    free_idx = np.flatnonzero(fixed < 0).astype(np.int64)
    if record_states and (free_idx.size * np.log2(max(params.h, 2)) + bonds.size) > 62:
        raise ValueError("state codes limited to 62 bits")
    _seed(_random.derive_seed(params.seed, _random.POTTS, stream) % (2**32))
    obs, codes, err = _run(lattice.edges, fixed, spins, bonds, float(params.nu), int(params.h),
                           lattice.bulk, lattice.row, lattice.T, params.thermalization, params.sweeps,
                           params.stride, record_states, free_idx)
    if err:
        raise InvariantViolation("cluster joined two different fixed spins")
    lattice.spins, lattice.bonds = spins, bonds
    return ChainResult(params, obs, codes)


def sw_sweep(lattice: RbcLattice, params: RbcParams, n: int = 1, stream: int = 0) -> RbcLattice:
    """Apply ``n`` Swendsen-Wang updates in place and return ``lattice``.

    Pass a different ``stream`` on each call to continue with fresh randomness.
    """
    run_chain(lattice, RbcParams(params.h, params.nu, sweeps=0, thermalization=n, seed=params.seed), stream=stream)
    return lattice


def measure(lattice: RbcLattice, h: int) -> dict:
    """Estimators of the current configuration (clusters from the current bonds)."""
    n = lattice.n_vertices
    parent = np.arange(n, dtype=np.int64)
    for e in np.flatnonzero(lattice.bonds):
        u, v = lattice.edges[e]
        ru, rv = _find(parent, u), _find(parent, v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    out = np.zeros(5)
    _measure(lattice.spins.astype(np.int64), lattice.bonds.astype(np.int8), parent, lattice.bulk,
             lattice.row, lattice.T, int(h), out)
    return dict(zip(OBSERVABLES, out.tolist()))
