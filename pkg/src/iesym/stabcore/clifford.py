"""The two-qubit Clifford group (11,520 elements modulo global phase).

A two-qubit Pauli is indexed by the 4-bit integer
``x1 | z1 << 1 | x2 << 2 | z2 << 3`` and stands for the Hermitian operator
``P1 (x) P2`` with ``P = X, Z, Y`` for ``(x, z) = (1, 0), (0, 1), (1, 1)``.
A Clifford is stored by its action on these 16 Paulis: an image index and a
sign bit.  Elements are enumerated as ``16 * k + signs`` where ``k`` runs over
the 720 symplectic matrices of ``Sp(4, 2)`` in lexicographic order and the four
sign bits fix the signs of the images of ``X1, Z1, X2, Z2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

N_CLIFFORD2 = 11520

_PAULI_1Q = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def pauli_bits(index: int) -> tuple[int, int, int, int]:
    """``(x1, z1, x2, z2)`` for a 4-bit Pauli index."""
    return index & 1, (index >> 1) & 1, (index >> 2) & 1, (index >> 3) & 1


def pauli_matrix(index: int) -> np.ndarray:
    """4x4 matrix of the Hermitian two-qubit Pauli, qubit 1 most significant."""
    x1, z1, x2, z2 = pauli_bits(index)
    return np.kron(_PAULI_1Q[(x1, z1)], _PAULI_1Q[(x2, z2)])


def _symplectic_form() -> np.ndarray:
    om = np.zeros((4, 4), dtype=np.int64)
    om[0, 1] = om[1, 0] = om[2, 3] = om[3, 2] = 1
    return om


@lru_cache(maxsize=1)
def symplectic_matrices() -> np.ndarray:
    """All 720 elements of ``Sp(4, 2)`` as ``(720, 4, 4)`` 0/1 arrays.

    Column ``j`` is the image of basis vector ``j`` in the order
    ``(x1, z1, x2, z2)``.  Found by brute force over all 4x4 binary matrices.
    """
    codes = np.arange(1 << 16, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(16)) & 1
    mats = bits.reshape(-1, 4, 4)  # row-major, lexicographic in the flattened bits
    om = _symplectic_form()
    lhs = np.einsum("kij,il,klm->kjm", mats, om, mats) % 2
    keep = np.all(lhs == om, axis=(1, 2))
    return mats[keep]


def _mul(a, b):
    """Product of ``i^k X^x Z^z`` terms stored as (k, x, z) with 4-bit x/z over 2 qubits."""
    ka, xa, za = a
    kb, xb, zb = b
    # Z^za X^xb = (-1)^{za . xb} X^xb Z^za
    k = (ka + kb + 2 * bin(za & xb).count("1")) % 4
    return k, xa ^ xb, za ^ zb


def _xz_of_index(idx: int) -> tuple[int, int]:
    x1, z1, x2, z2 = pauli_bits(idx)
    return x1 | (x2 << 1), z1 | (z2 << 1)


def _index_of_xz(x: int, z: int) -> int:
    return (x & 1) | ((z & 1) << 1) | (((x >> 1) & 1) << 2) | (((z >> 1) & 1) << 3)


def _hermitian(idx: int, sign: int):
    """``(-1)^sign`` times the Hermitian Pauli ``idx`` in (k, x, z) form."""
    x, z = _xz_of_index(idx)
    return (2 * sign + bin(x & z).count("1")) % 4, x, z


def _tables_from_generators(gen_img: list[int], gen_sign: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Images and signs of all 16 Paulis from the images of X1, Z1, X2, Z2."""
    # basis vector order (x1, z1, x2, z2) matches bit order of the index
    img = np.zeros(16, dtype=np.int64)
    sgn = np.zeros(16, dtype=np.int64)
    gens = [_hermitian(i, s) for i, s in zip(gen_img, gen_sign)]
    for idx in range(16):
        x1, z1, x2, z2 = pauli_bits(idx)
        # P = i^{x.z} X1^x1 X2^x2 Z1^z1 Z2^z2
        acc = (bin(_xz_of_index(idx)[0] & _xz_of_index(idx)[1]).count("1") % 4, 0, 0)
        for use, g in ((x1, gens[0]), (x2, gens[2]), (z1, gens[1]), (z2, gens[3])):
            if use:
                acc = _mul(acc, g)
        k, x, z = acc
        rel = (k - bin(x & z).count("1")) % 4
        if rel not in (0, 2):
            raise AssertionError("non-Hermitian image")
        img[idx] = _index_of_xz(x, z)
        sgn[idx] = rel // 2
    return img, sgn


def _anf(truth: np.ndarray) -> int:
    """Algebraic normal form of a 16-entry boolean truth table as a 16-bit mask."""
    coef = truth.astype(np.int64).copy()
    for i in range(4):
        step = 1 << i
        for j in range(16):
            if j & step:
                coef[j] ^= coef[j ^ step]
    return int(sum(int(c) << j for j, c in enumerate(coef)))


@dataclass(frozen=True)
class CliffordTables:
    """Lookup tables for the whole two-qubit Clifford group.

    Attributes:
        image: ``(11520, 16)`` image Pauli index of each Pauli.
        sign: ``(11520, 16)`` sign bit of each image.
        masks: ``(11520, 4)`` for each output bit (x1, z1, x2, z2) the 4-bit
            mask of input bits whose XOR produces it.
        anf: ``(11520,)`` algebraic normal form of the sign function.
    """

    image: np.ndarray
    sign: np.ndarray
    masks: np.ndarray
    anf: np.ndarray


@lru_cache(maxsize=1)
def clifford_tables() -> CliffordTables:
    sym = symplectic_matrices()
    n = sym.shape[0] * 16
    image = np.zeros((n, 16), dtype=np.int64)
    sign = np.zeros((n, 16), dtype=np.int64)
    masks = np.zeros((n, 4), dtype=np.uint8)
    anf = np.zeros(n, dtype=np.uint16)
    weights = 1 << np.arange(4)
    for k, m in enumerate(sym):
        gen_img = [int((m[:, j] * weights).sum()) for j in range(4)]
        row_masks = (m * weights[None, :]).sum(axis=1).astype(np.uint8)
        for s in range(16):
            cid = 16 * k + s
            img, sg = _tables_from_generators(gen_img, [(s >> j) & 1 for j in range(4)])
            image[cid] = img
            sign[cid] = sg
            masks[cid] = row_masks
            anf[cid] = _anf(sg)
    for arr in (image, sign, masks, anf):
        arr.setflags(write=False)
    return CliffordTables(image, sign, masks, anf)


def clifford_unitary(cid: int) -> np.ndarray:
    """4x4 unitary (qubit 1 most significant) implementing Clifford ``cid``.

    The unitary is the projection of a fixed generic matrix onto the
    commutant ``{V : V P = C(P) V}``, normalized and with its first nonzero
    entry made real positive.
    """
    return _unitaries()[cid]


@lru_cache(maxsize=1)
def _unitaries() -> np.ndarray:
    tab = clifford_tables()
    paulis = np.array([pauli_matrix(i) for i in range(16)])
    rng = np.random.default_rng(12345)
    seed_mats = [rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3)]
    out = np.zeros((N_CLIFFORD2, 4, 4), dtype=complex)
    for cid in range(N_CLIFFORD2):
        images = paulis[tab.image[cid]] * np.where(tab.sign[cid], -1.0, 1.0)[:, None, None]
        for m in seed_mats:
            v = np.einsum("pij,jk,plk->il", images, m, paulis.conj()) / 16.0
            norm = np.sqrt(np.real(np.trace(v.conj().T @ v)) / 4.0)
            if norm > 1e-6:
                break
        v = v / norm
        flat = v.reshape(-1)
        first = flat[np.argmax(np.abs(flat) > 1e-9)]
        out[cid] = v * (abs(first) / first)
    out.setflags(write=False)
    return out


def clifford_index(unitary: np.ndarray) -> int:
    """Index of the Clifford implemented by a 4x4 unitary."""
    gen_img, gen_sign = [], []
    for g in (1, 2, 4, 8):
        img = unitary @ pauli_matrix(g) @ unitary.conj().T
        for idx in range(16):
            ov = np.trace(pauli_matrix(idx) @ img).real / 4.0
            if abs(abs(ov) - 1.0) < 1e-9:
                gen_img.append(idx)
                gen_sign.append(0 if ov > 0 else 1)
                break
        else:
            raise ValueError("not a Clifford unitary")
    m = np.array([[(gi >> r) & 1 for gi in gen_img] for r in range(4)])
    sym = symplectic_matrices()
    k = int(np.flatnonzero(np.all(sym == m, axis=(1, 2)))[0])
    return 16 * k + sum(s << j for j, s in enumerate(gen_sign))


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


@lru_cache(maxsize=None)
def named_clifford(name: str) -> int:
    """Index of ``identity``, ``cnot`` (control = qubit 1) or ``swap``."""
    mats = {"identity": np.eye(4, dtype=complex), "cnot": _CNOT, "swap": _SWAP}
    return clifford_index(mats[name])


def uniform_clifford2(*keys) -> np.ndarray:
    """Uniform Clifford indices from counter-based keys (see :mod:`iesym._random`)."""
    from iesym._random import randint

    return randint(N_CLIFFORD2, *keys)
