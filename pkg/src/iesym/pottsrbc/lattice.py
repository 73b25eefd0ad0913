"""Brickwork graphs for the random-bond-cluster model.

Vertices are the bricks of an ``L x T`` brickwork (periodic in space).  Each
site connects the brick containing it at layer ``t`` to the brick containing
it at layer ``t + 1``; that slot is where a probe event can cut the bond.  The
result is a square lattice rotated by 45 degrees with ``L / 2`` vertices per
row.

Boundaries are per-site ghost vertices carrying fixed spins: a final row at
``t = T`` (always attached to the last brick row through a probe slot) and an
optional initial row at ``t = -1``.  ``FREE`` tags omit the ghost.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from iesym.circuit import bricks

FREE = -1
FIXED_IDENTITY = 0  # spin of the identity-type boundary
FIXED_SHIFT = 1  # spin of the cyclic-shift-type boundary


class GeometryError(ValueError):
    pass


@dataclass
class RbcLattice:
    """Graph, boundary tags and the current spin/bond state.

    Attributes:
        L, T: sites and brick layers.
        periodic_time: bulk geometry with layer ``T - 1`` linked to layer 0.
        edges: ``(m, 2)`` vertex pairs, one per probe slot.
        fixed: per-vertex fixed spin or ``FREE``.
        row: per-vertex brick layer (``-1`` / ``T`` for ghosts).
        spins: current spins.
        bonds: current bond occupation (1 = present, i.e. no probe event).
    """

    L: int
    T: int
    periodic_time: bool
    edges: np.ndarray
    fixed: np.ndarray
    row: np.ndarray
    spins: np.ndarray = field(default=None)
    bonds: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.spins is None:
            self.spins = np.where(self.fixed >= 0, self.fixed, 0).astype(np.int64)
        if self.bonds is None:
            self.bonds = np.zeros(len(self.edges), dtype=np.int8)

    @property
    def n_vertices(self) -> int:
        return int(self.fixed.size)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def bulk(self) -> np.ndarray:
        """Mask of brick (non-ghost) vertices."""
        return (self.row >= 0) & (self.row < self.T)

    def to_json(self) -> str:
        return json.dumps({
            "L": self.L, "T": self.T, "periodic_time": self.periodic_time,
            "edges": self.edges.tolist(), "fixed": self.fixed.tolist(), "row": self.row.tolist(),
            "spins": self.spins.tolist(), "bonds": self.bonds.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "RbcLattice":
        d = json.loads(text)
        return cls(d["L"], d["T"], d["periodic_time"], np.array(d["edges"], dtype=np.int64).reshape(-1, 2),
                   np.array(d["fixed"], dtype=np.int64), np.array(d["row"], dtype=np.int64),
                   np.array(d["spins"], dtype=np.int64), np.array(d["bonds"], dtype=np.int8))


def _brick_of_site(L: int, t: int) -> np.ndarray:
    out = np.empty(L, dtype=np.int64)
    for j, (x, y) in enumerate(bricks(L, t)):
        out[x] = out[y] = j
    return out


def final_tags(L: int, p_sites) -> np.ndarray:
    """Per-site final tags: shift-type on ``p_sites``, identity-type elsewhere."""
    tags = np.full(L, FIXED_IDENTITY, dtype=np.int64)
    tags[list(p_sites)] = FIXED_SHIFT
    return tags


def build_lattice(L: int, T: int, final=None, initial=None, periodic_time: bool = False) -> RbcLattice:
    """Construct the brickwork graph.

    Args:
        L: sites (even, >= 2).
        T: brick layers (>= 1; even when ``periodic_time``).
        final: per-site tags of the final boundary (``FREE`` entries omitted),
            or ``None`` for a free final boundary.
        initial: per-site tags of the initial boundary or ``None`` (free, the
            pure-input case).
        periodic_time: link the last brick layer back to the first; no ghost
            rows are allowed then.
    """
    if not isinstance(L, (int, np.integer)) or L < 2 or L % 2:
        raise GeometryError(f"L: must be an even integer >= 2, got {L!r}")
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise GeometryError(f"T: must be a positive integer, got {T!r}")
    if periodic_time and (T % 2 or final is not None or initial is not None):
        raise GeometryError("periodic_time needs even T and no boundary rows")
    per_row = L // 2
    n = per_row * T
    fixed = [FREE] * n
    row = [t for t in range(T) for _ in range(per_row)]
    edges = []
    maps = [_brick_of_site(L, t) for t in range(T)]
    last = T if periodic_time else T - 1
    for t in range(last):
        a, b = maps[t], maps[(t + 1) % T]
        for s in range(L):
            edges.append((t * per_row + a[s], ((t + 1) % T) * per_row + b[s]))
    for tags, t_row, t_ghost in ((final, T - 1, T), (initial, 0, -1)):
        if tags is None:
            continue
        tags = np.asarray(tags, dtype=np.int64)
        if tags.shape != (L,):
            raise GeometryError(f"boundary tags need one entry per site, got shape {tags.shape}")
        for s in range(L):
            if tags[s] == FREE:
                continue
            fixed.append(int(tags[s]))
            row.append(t_ghost)
            edges.append((t_row * per_row + maps[t_row][s], len(fixed) - 1))
    return RbcLattice(L, T, periodic_time, np.array(edges, dtype=np.int64).reshape(-1, 2),
                      np.array(fixed, dtype=np.int64), np.array(row, dtype=np.int64))


def nu_from_p(p, q, n):
    """Renormalized bond probability ``(1 - p) / (p q^(1-n) + 1 - p)``.

    Exact for :class:`fractions.Fraction` or integer inputs.
    """
    _check_nu_args(p, q, n)
    return (1 - p) / (p * _inv_power(q, n - 1) + (1 - p))


def nu_prime_from_p(p, q, n):
    """Bond probability with mixed environment and entangled apparatus inputs,
    ``(1 - p) / (p q^(2-2n) + 1 - p)``."""
    _check_nu_args(p, q, n)
    return (1 - p) / (p * _inv_power(q, 2 * n - 2) + (1 - p))


def _inv_power(q, k):
    from fractions import Fraction

    if isinstance(q, (int, np.integer)) and not isinstance(q, bool):
        return Fraction(1, int(q) ** k)
    return q ** (-k)


def _check_nu_args(p, q, n):
    if not 0 <= p <= 1:
        raise ValueError(f"p: must lie in [0, 1], got {p!r}")
    if q < 2:
        raise ValueError(f"q: must be >= 2, got {q!r}")
    if n < 2:
        raise ValueError(f"n: must be >= 2, got {n!r}")


def self_dual_point(h: float) -> float:
    """Critical bond probability ``sqrt(h) / (1 + sqrt(h))`` of the square-lattice random-cluster model."""
    return float(np.sqrt(h) / (1 + np.sqrt(h)))
