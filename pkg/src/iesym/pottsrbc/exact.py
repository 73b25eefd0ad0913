"""Exact Edwards-Sokal distribution on small lattices by enumeration."""

from __future__ import annotations

import itertools

import numpy as np

from iesym.pottsrbc.lattice import RbcLattice
from iesym.pottsrbc.sampler import _prepare

MAX_STATES = 1 << 22


def state_code(spins_free, bonds, h: int) -> int:
    """Integer code of free spins (base ``h``) followed by bond bits; matches the sampler."""
    c = 0
    for s in spins_free:
        c = c * h + int(s)
    for b in bonds:
        c = c * 2 + int(b)
    return c


def es_distribution(lattice: RbcLattice, h: int, nu: float) -> dict[int, float]:
    """Normalized weights of all (free spins, bonds) configurations with nonzero weight."""
    fixed = _prepare(lattice, h)
    free = np.flatnonzero(fixed < 0)
    m = lattice.n_edges
    if h ** free.size * 2**m > MAX_STATES:
        raise ValueError("lattice too large for enumeration")
    u, v = lattice.edges[:, 0], lattice.edges[:, 1]
    out = {}
    spins = fixed.copy()
    for conf in itertools.product(range(h), repeat=free.size):
        spins[free] = conf
        equal = spins[u] == spins[v]
        for bonds in itertools.product((0, 1), repeat=m):
            b = np.array(bonds, dtype=bool)
            if np.any(b & ~equal):
                continue
            w = float(np.prod(np.where(b, nu, 1.0 - nu)))
            if w > 0:
                out[state_code(conf, bonds, h)] = w
    z = sum(out.values())
    return {k: w / z for k, w in out.items()}


def exact_bond_density(lattice: RbcLattice, h: int, nu: float) -> float:
    m = lattice.n_edges
    dist = es_distribution(lattice, h, nu)
    return float(sum(w * bin(code % (1 << m)).count("1") for code, w in dist.items()) / m)
