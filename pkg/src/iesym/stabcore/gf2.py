"""Bit-packed GF(2) kernels (numba).

Vectors are rows of ``uint64`` words, bit ``i`` of the vector living in bit
``i % 64`` of word ``i // 64``.
"""

from __future__ import annotations

import numba as nb
import numpy as np

WORD = 64


def n_words(nbits: int) -> int:
    return (nbits + WORD - 1) // WORD


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2D 0/1 array row-wise into uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    w = max(1, n_words(cols))
    padded = np.zeros((rows, w * WORD), dtype=np.uint8)
    padded[:, :cols] = bits
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(rows, w)


def unpack_rows(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    bits = np.unpackbits(words.view(np.uint8).reshape(words.shape[0], -1), axis=1, bitorder="little")
    return bits[:, :nbits]


@nb.njit(cache=True)
def _lowest_bit(v, nw):
    for w in range(nw):
        x = v[w]
        if x != 0:
            m = x & (~x + np.uint64(1))
            return w, m
    return -1, np.uint64(0)


@nb.njit(cache=True)
def rank_packed(vecs, nw):
    """Rank of the rows of ``vecs[:, :nw]``; ``vecs`` is overwritten."""
    k = vecs.shape[0]
    piv_w = np.empty(k, dtype=np.int64)
    piv_m = np.empty(k, dtype=np.uint64)
    r = 0
    for i in range(k):
        v = vecs[i]
        for j in range(r):
            if v[piv_w[j]] & piv_m[j]:
                b = vecs[j]
                for w in range(nw):
                    v[w] ^= b[w]
        pw, pm = _lowest_bit(v, nw)
        if pw >= 0:
            if i != r:
                for w in range(nw):
                    vecs[r, w] = v[w]
            piv_w[r] = pw
            piv_m[r] = pm
            r += 1
    return r


@nb.njit(cache=True)
def basis_insert(basis, piv_w, piv_m, nb_, v, nw):
    """Reduce ``v`` against the first ``nb_`` basis rows; append if independent.

    Returns the new basis size.
    """
    for j in range(nb_):
        if v[piv_w[j]] & piv_m[j]:
            b = basis[j]
            for w in range(nw):
                v[w] ^= b[w]
    pw, pm = _lowest_bit(v, nw)
    if pw < 0:
        return nb_
    for w in range(nw):
        basis[nb_, w] = v[w]
    piv_w[nb_] = pw
    piv_m[nb_] = pm
    return nb_ + 1


@nb.njit(cache=True)
def extension_rank(basis, piv_w, piv_m, nb_, extra, nw):
    """Rank added by the rows of ``extra`` on top of a reduced basis.

    ``extra`` is overwritten.  The basis itself is left untouched.
    """
    k = extra.shape[0]
    e_w = np.empty(k, dtype=np.int64)
    e_m = np.empty(k, dtype=np.uint64)
    r = 0
    for i in range(k):
        v = extra[i]
        for j in range(nb_):
            if v[piv_w[j]] & piv_m[j]:
                b = basis[j]
                for w in range(nw):
                    v[w] ^= b[w]
        for j in range(r):
            if v[e_w[j]] & e_m[j]:
                b = extra[j]
                for w in range(nw):
                    v[w] ^= b[w]
        pw, pm = _lowest_bit(v, nw)
        if pw >= 0:
            if i != r:
                for w in range(nw):
                    extra[r, w] = v[w]
            e_w[r] = pw
            e_m[r] = pm
            r += 1
    return r


def gf2_rank(bits: np.ndarray) -> int:
    """Rank over GF(2) of a dense 0/1 matrix."""
    bits = np.asarray(bits)
    if bits.size == 0:
        return 0
    packed = pack_rows(bits)
    return int(rank_packed(packed, packed.shape[1]))
