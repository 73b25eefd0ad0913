"""Dense state vectors on labelled qubit registers."""

from __future__ import annotations

import json
from typing import Hashable, Iterable, Sequence

import numpy as np

from iesym.stabcore.clifford import clifford_unitary

MAX_QUBITS = 24
EIG_CUTOFF = 1e-12

_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_BELL = np.array([[1, 0], [0, 1]], dtype=complex) / np.sqrt(2.0)


class CapacityError(RuntimeError):
    """The register would exceed the dense qubit cap."""


def haar_unitary(dim: int, rng: np.random.Generator | int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix.

    The phases of ``R``'s diagonal are absorbed into ``Q`` so that the
    distribution is exactly Haar.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.Generator(np.random.Philox(key=int(rng)))
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def gate_matrix(g) -> np.ndarray:
    """4x4 unitary for a Clifford index or a ``("haar", seed)`` token."""
    if isinstance(g, tuple) and g[0] == "haar":
        return haar_unitary(4, g[1])
    if isinstance(g, np.ndarray):
        return g
    return clifford_unitary(int(g))


class DenseState:
    """Pure state of a labelled qubit register.

    The amplitude tensor has one axis of length 2 per qubit, ordered as
    ``labels``.  Operations return new states; ``swap`` only exchanges labels.
    """

    __slots__ = ("labels", "psi", "_pos")

    def __init__(self, labels: Sequence[Hashable] = (), psi: np.ndarray | None = None):
        self.labels = list(labels)
        if psi is None:
            psi = np.zeros((2,) * len(self.labels), dtype=complex)
            psi[(0,) * len(self.labels)] = 1.0
        self.psi = np.asarray(psi, dtype=complex)
        if self.psi.ndim != len(self.labels):
            raise ValueError("amplitude rank does not match labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")
        self._pos = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def axis(self, label) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise KeyError(f"unknown qubit {label!r}") from None

    def has(self, label) -> bool:
        return label in self._pos

    def _check_cap(self, extra: int) -> None:
        if self.n_qubits + extra > MAX_QUBITS:
            raise CapacityError(f"dense register limited to {MAX_QUBITS} qubits")

    # preparation --------------------------------------------------------
    def add_zero(self, label) -> "DenseState":
        self._check_cap(1)
        psi = np.stack([self.psi, np.zeros_like(self.psi)], axis=-1)
        return DenseState(self.labels + [label], psi)

    def add_bell(self, l1, l2) -> "DenseState":
        self._check_cap(2)
        psi = np.multiply.outer(self.psi, _BELL)
        return DenseState(self.labels + [l1, l2], psi)

    # dynamics -----------------------------------------------------------
    def apply_2q(self, l1, l2, u: np.ndarray) -> "DenseState":
        """Apply a 4x4 unitary with ``l1`` as its most significant qubit."""
        i, j = self.axis(l1), self.axis(l2)
        if i == j:
            raise ValueError("two-qubit gate on a single qubit")
        u4 = np.asarray(u, dtype=complex).reshape(2, 2, 2, 2)
        out = np.tensordot(u4, self.psi, axes=([2, 3], [i, j]))
        out = np.moveaxis(out, [0, 1], [i, j])
        return DenseState(self.labels, out)

    def apply_1q(self, label, u: np.ndarray) -> "DenseState":
        i = self.axis(label)
        out = np.moveaxis(np.tensordot(u, self.psi, axes=([1], [i])), 0, i)
        return DenseState(self.labels, out)

    def swap(self, l1, l2) -> "DenseState":
        i, j = self.axis(l1), self.axis(l2)
        labels = list(self.labels)
        labels[i], labels[j] = labels[j], labels[i]
        return DenseState(labels, self.psi)

    def apply_op(self, op: tuple) -> "DenseState":
        kind = op[0]
        if kind == "zero":
            return self.add_zero(op[1])
        if kind == "bell":
            return self.add_bell(op[1], op[2])
        if kind == "swap":
            return self.swap(op[1], op[2])
        if kind == "cnot":
            return self.apply_2q(op[1], op[2], _CNOT)
        if kind == "gate":
            return self.apply_2q(op[1], op[2], gate_matrix(op[3]))
        raise ValueError(f"unknown op {kind!r}")

    def apply_ops(self, ops: Iterable[tuple]) -> "DenseState":
        st = self
        for op in ops:
            st = st.apply_op(op)
        return st

    def permute_labels(self, mapping: dict) -> "DenseState":
        """Relabel qubits; exchanging two labels swaps the qubits' roles."""
        return DenseState([mapping.get(l, l) for l in self.labels], self.psi)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))

    def overlap(self, other: "DenseState") -> complex:
        """``<self|other>`` after aligning ``other``'s axes to ``self``'s labels."""
        perm = [other.axis(l) for l in self.labels]
        return complex(np.vdot(self.psi, np.transpose(other.psi, perm)))

    def to_json(self) -> str:
        """Labels and amplitudes as ``(re, im)`` pairs in C order."""
        flat = self.psi.reshape(-1)
        return json.dumps({"labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
                           "amplitudes": [[float(z.real), float(z.imag)] for z in flat]})

    @classmethod
    def from_json(cls, text: str) -> "DenseState":
        d = json.loads(text)
        labels = [tuple(l) if isinstance(l, list) else l for l in d["labels"]]
        amp = np.array([complex(re, im) for re, im in d["amplitudes"]])
        return cls(labels, amp.reshape((2,) * len(labels)))

    # reduced states -----------------------------------------------------
    def _split(self, region) -> np.ndarray:
        idx = [self.axis(l) for l in region]
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate qubits in region")
        rest = [i for i in range(self.n_qubits) if i not in set(idx)]
        return np.transpose(self.psi, idx + rest).reshape(2 ** len(idx), -1)

    def reduced_density_matrix(self, region: Sequence) -> np.ndarray:
        m = self._split(list(region))
        return m @ m.conj().T

    def spectrum(self, region: Sequence) -> np.ndarray:
        """Eigenvalues of the reduced state on ``region`` (using the smaller side)."""
        region = list(region)
        if not region or len(region) == self.n_qubits:
            return np.array([self.norm() ** 2])
        sel = set(region)
        if 2 * len(region) > self.n_qubits:
            region = [l for l in self.labels if l not in sel]
        m = self._split(region)
        rho = m @ m.conj().T
        ev = np.linalg.eigvalsh(rho)
        ev[ev < EIG_CUTOFF] = 0.0
        return ev


def renyi_from_spectrum(ev: np.ndarray, n: float) -> float:
    """Renyi entropy (bits) of a normalized spectrum; ``n = 1`` is von Neumann."""
    ev = np.asarray(ev, dtype=float)
    ev = ev[ev > 0]
    if n == 1:
        return float(-(ev * np.log2(ev)).sum())
    return float(np.log2((ev**n).sum()) / (1.0 - n))


def entropy(state: DenseState, region: Sequence, n: float = 1) -> float:
    """Renyi-``n`` entropy in bits of the reduced state on ``region``.

    The empty region has entropy 0.
    """
    if len(region) == 0:
        return 0.0
    return renyi_from_spectrum(state.spectrum(region), n)


renyi_entropy = entropy


def bell_pairs(count: int, labels: Sequence[tuple] | None = None) -> DenseState:
    """``count`` Bell pairs ``(|00> + |11>)/sqrt(2)``.

    Default labels are ``("B", i, 0)`` and ``("B", i, 1)`` for pair ``i``;
    otherwise ``labels`` lists the ``(first, second)`` label of each pair.
    """
    if count < 1:
        raise ValueError(f"count: must be >= 1, got {count}")
    if labels is None:
        labels = [(("B", i, 0), ("B", i, 1)) for i in range(count)]
    if len(labels) != count:
        raise ValueError("labels: need one pair per Bell pair")
    st = DenseState()
    for l1, l2 in labels:
        st = st.add_bell(l1, l2)
    return st


def renyi2_direct(state: DenseState, region: Sequence) -> float:
    """Second Renyi entropy from ``tr rho^2`` without diagonalizing."""
    rho = state.reduced_density_matrix(region)
    return float(-np.log2(np.real(np.trace(rho @ rho))))
