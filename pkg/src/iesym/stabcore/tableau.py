"""Bit-packed stabilizer tableau for a register that grows on demand.

Only the stabilizer generators are stored (destabilizers are not needed for
unitary Clifford evolution and entropies).  Storage is column-major: for each
qubit ``q`` the X bits of all generators form a bitset ``x[q]`` and likewise
for Z; the signs form one more bitset.  A two-qubit gate then touches four
bitsets and a qubit allocation appends one generator and one column.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from iesym.stabcore.clifford import clifford_tables
from iesym.stabcore.gf2 import WORD, n_words, rank_packed, unpack_rows


class InvariantError(RuntimeError):
    """A tableau failed its commutation, rank or sign checks."""


@nb.njit(cache=True)
def _apply_gates(xs, zs, rs, q1s, q2s, cids, masks, anfs, nw):
    for g in range(cids.shape[0]):
        a = q1s[g]
        b = q2s[g]
        cid = cids[g]
        m0 = masks[cid, 0]
        m1 = masks[cid, 1]
        m2 = masks[cid, 2]
        m3 = masks[cid, 3]
        anf = anfs[cid]
        for w in range(nw):
            v0 = xs[a, w]
            v1 = zs[a, w]
            v2 = xs[b, w]
            v3 = zs[b, w]
            s = np.uint64(0)
            for mono in range(1, 16):
                if (anf >> mono) & 1:
                    t = ~np.uint64(0)
                    if mono & 1:
                        t &= v0
                    if mono & 2:
                        t &= v1
                    if mono & 4:
                        t &= v2
                    if mono & 8:
                        t &= v3
                    s ^= t
            rs[w] ^= s
            o0 = np.uint64(0)
            o1 = np.uint64(0)
            o2 = np.uint64(0)
            o3 = np.uint64(0)
            vin = (v0, v1, v2, v3)
            for i in range(4):
                bit = np.uint8(1 << i)
                if m0 & bit:
                    o0 ^= vin[i]
                if m1 & bit:
                    o1 ^= vin[i]
                if m2 & bit:
                    o2 ^= vin[i]
                if m3 & bit:
                    o3 ^= vin[i]
            xs[a, w] = o0
            zs[a, w] = o1
            xs[b, w] = o2
            zs[b, w] = o3


class Tableau:
    """Pure stabilizer state on a growing register.

    Qubits are numbered in allocation order; generator ``k`` is created by the
    ``k``-th allocated qubit.  New qubits start in ``|0>`` or in Bell pairs.
    """

    def __init__(self, capacity: int = 64):
        capacity = max(WORD, capacity)
        self.n = 0
        self._x = np.zeros((capacity, n_words(capacity)), dtype=np.uint64)
        self._z = np.zeros_like(self._x)
        self._r = np.zeros(n_words(capacity), dtype=np.uint64)
        tab = clifford_tables()
        self._masks = np.ascontiguousarray(tab.masks)
        self._anf = np.ascontiguousarray(tab.anf)

    # storage -------------------------------------------------------------
    @property
    def words(self) -> int:
        return max(1, n_words(self.n))

    def _grow(self, extra: int) -> None:
        need = self.n + extra
        qcap, wcap = self._x.shape
        if need <= qcap and n_words(need) <= wcap:
            return
        new_q = qcap
        while new_q < need:
            new_q *= 2
        new_w = max(wcap, n_words(new_q))
        for name in ("_x", "_z"):
            old = getattr(self, name)
            arr = np.zeros((new_q, new_w), dtype=np.uint64)
            arr[:qcap, :wcap] = old
            setattr(self, name, arr)
        r = np.zeros(new_w, dtype=np.uint64)
        r[:wcap] = self._r
        self._r = r

    def _set(self, arr: np.ndarray, q: int, row: int) -> None:
        arr[q, row // WORD] |= np.uint64(1) << np.uint64(row % WORD)

    # allocation ----------------------------------------------------------
    def add_zero(self) -> int:
        """Append a qubit in ``|0>``; returns its index."""
        self._grow(1)
        q = self.n
        self._set(self._z, q, q)
        self.n += 1
        return q

    def add_bell(self) -> tuple[int, int]:
        """Append two qubits in ``(|00> + |11>)/sqrt 2``."""
        self._grow(2)
        q1, q2 = self.n, self.n + 1
        for q in (q1, q2):
            self._set(self._x, q, q1)
            self._set(self._z, q, q2)
        self.n += 2
        return q1, q2

    # gates ---------------------------------------------------------------
    def apply(self, q1: int, q2: int, cid: int) -> None:
        """Apply two-qubit Clifford ``cid`` with ``q1`` as its first qubit."""
        self.apply_many(np.array([q1]), np.array([q2]), np.array([cid]))

    def apply_many(self, q1s, q2s, cids) -> None:
        q1s = np.asarray(q1s, dtype=np.int64)
        q2s = np.asarray(q2s, dtype=np.int64)
        if np.any(q1s == q2s) or np.any(q1s >= self.n) or np.any(q2s >= self.n):
            raise ValueError("invalid gate support")
        _apply_gates(self._x, self._z, self._r, q1s, q2s, np.asarray(cids, dtype=np.int64),
                     self._masks, self._anf, self.words)

    # queries -------------------------------------------------------------
    def column_vectors(self, qubits) -> np.ndarray:
        """Stacked X and Z column bitsets of ``qubits``, shape ``(2k, words)``."""
        qubits = np.asarray(list(qubits), dtype=np.int64)
        nw = self.words
        return np.concatenate([self._x[qubits, :nw], self._z[qubits, :nw]]).copy()

    def entropy(self, qubits) -> int:
        """Entanglement entropy (bits) of a subset of qubits."""
        qubits = list(qubits)
        if not qubits:
            return 0
        if len(set(qubits)) != len(qubits):
            raise ValueError("duplicate qubits in region")
        vecs = self.column_vectors(qubits)
        return int(rank_packed(vecs, self.words)) - len(qubits)

    def to_bits(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Row-major 0/1 arrays ``(x, z, sign)``; row = generator, column = qubit."""
        nw = self.words
        x = unpack_rows(self._x[: self.n, :nw], self.n).T.copy()
        z = unpack_rows(self._z[: self.n, :nw], self.n).T.copy()
        r = unpack_rows(self._r[None, :nw], self.n)[0].copy()
        return x, z, r

    def check_invariants(self) -> None:
        """Raise :class:`InvariantError` unless generators commute and are independent."""
        x, z, _ = self.to_bits()
        xi = x.astype(np.int64)
        zi = z.astype(np.int64)
        comm = (xi @ zi.T + zi @ xi.T) % 2
        if comm.any():
            raise InvariantError("stabilizer generators do not commute")
        full = np.concatenate([x, z], axis=1)
        from iesym.stabcore.gf2 import gf2_rank

        if gf2_rank(full) != self.n:
            raise InvariantError("stabilizer generators are dependent")

    def dump(self) -> str:
        """Hex rows ``sign:x:z`` for debugging."""
        x, z, r = self.to_bits()
        lines = []
        for k in range(self.n):
            xs = np.packbits(x[k], bitorder="little").tobytes().hex()
            zs = np.packbits(z[k], bitorder="little").tobytes().hex()
            lines.append(f"{'-' if r[k] else '+'}:{xs}:{zs}")
        return "\n".join(lines)

    def copy(self) -> "Tableau":
        out = Tableau.__new__(Tableau)
        out.n = self.n
        out._x = self._x.copy()
        out._z = self._z.copy()
        out._r = self._r.copy()
        out._masks = self._masks
        out._anf = self._anf
        return out
