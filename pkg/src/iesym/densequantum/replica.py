"""Replica tensors conditioned on the apparatus, and their symmetry checks.

For ``n`` copies of ``|U><U|`` the conditional replica tensor is
``tr_{A E}[(|U><U|)^{(x)n} X_{+1}^A]`` where ``X_p`` permutes replicas,
``X_p |x_1 ... x_n> = |x_{p(1)} ... x_{p(n)}>``, and ``+1`` is the cyclic
shift ``i -> i + 1``.  It is an operator on ``n`` copies of the kept register
(system plus reference).

Three replica maps leave the tensor of any state invariant (rotation ``S``:
``X_{+1} Sigma X_{-1}``, and ``H``: ``X_r Sigma^dagger X_r`` with ``r`` the
reflection ``i -> n-1-i``).  A fourth map, ``E``: ``X_r X_{+1} Sigma X_r``,
turns the apparatus-conditioned tensor into the environment-conditioned one,
so it is a symmetry exactly when apparatus and environment are exchangeable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from iesym.densequantum.state import CapacityError, DenseState
from iesym.permrep import Perm, shift

MAX_REPLICA_QUBITS = 12
MAX_CHAIN_BYTES = 1 << 30  # peak intermediate of the replica chain contraction


@dataclass
class ReplicaTensor:
    """Replica tensor as a ``(D**n, D**n)`` matrix; replica 1 is most significant."""

    matrix: np.ndarray
    n: int
    kept: list

    @property
    def dim(self) -> int:
        return 2 ** len(self.kept)


def _kept_default(state: DenseState) -> list:
    return [l for l in state.labels if l[0] in ("S", "R")]


def conditional_replica_tensor(state: DenseState, n: int, kept: list | None = None,
                               conditioning: list | None = None) -> ReplicaTensor:
    """Replica tensor of ``state`` conditioned on its apparatus register.

    The conditioning register is first compressed onto the support of its
    reduced state, which leaves the tensor unchanged because replica
    permutations commute with ``V^{(x)n}`` for any isometry ``V``.
    """
    kept = _kept_default(state) if kept is None else list(kept)
    if conditioning is None:
        conditioning = [l for l in state.labels if l[0] in ("A", "Ac")]
    if n * len(kept) > MAX_REPLICA_QUBITS:
        raise CapacityError(f"replica tensor limited to {MAX_REPLICA_QUBITS} replicated qubits")
    rest = [l for l in state.labels if l not in set(kept) | set(conditioning)]
    order = [state.axis(l) for l in kept + conditioning + rest]
    dk, da = 2 ** len(kept), 2 ** len(conditioning)
    psi = np.transpose(state.psi, order).reshape(dk, da, -1)
    if conditioning:
        rho_a = np.einsum("kar,kbr->ab", psi, psi.conj())
        ev, vec = np.linalg.eigh(rho_a)
        keep = ev > 1e-14 * max(1.0, ev.max())
        psi = np.einsum("kar,ab->kbr", psi, vec[:, keep].conj())
    da = psi.shape[1]
    if n > 2 and dk ** (2 * (n - 1)) * da * da * 16 > MAX_CHAIN_BYTES:
        raise CapacityError(f"replica chain needs more than {MAX_CHAIN_BYTES >> 20} MiB "
                            f"(conditioning rank {da}, n={n})")
    # blocks[s, s', a, a'] = rho_{KA}[(s, a), (s', a')]
    blocks = np.einsum("kar,lbr->klab", psi, psi.conj())
    chain = blocks
    for _ in range(n - 2):
        p, q = chain.shape[:2]
        chain = np.einsum("PQac,stcd->PsQtad", chain, blocks).reshape(p * dk, q * dk, da, da)
    if n == 1:
        mat = np.einsum("klaa->kl", blocks)
    else:
        p, q = chain.shape[:2]
        # close the trace: sum_{a, c} chain[P, Q, a, c] blocks[s, t, c, a]
        left = chain.reshape(p * q, da * da)
        right = np.transpose(blocks, (0, 1, 3, 2)).reshape(dk * dk, da * da)
        mat = (left @ right.T).reshape(p, q, dk, dk).transpose(0, 2, 1, 3).reshape(p * dk, q * dk)
    return ReplicaTensor(mat, n, kept)


def replica_tensor_from_spec(spec, n: int) -> ReplicaTensor:
    """Conditional replica tensor of the circuit ``spec`` (system and reference kept)."""
    from iesym.densequantum.engine import run_circuit_dense

    return conditional_replica_tensor(run_circuit_dense(spec), n)


def replica_tensor_to_json(rt: ReplicaTensor) -> str:
    """Matrix entries as ``(re, im)`` pairs, row-major, with ``n`` and the kept labels."""
    return json.dumps({"n": rt.n, "kept": [list(l) for l in rt.kept],
                       "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rt.matrix]})


@lru_cache(maxsize=64)
def _perm_index(images: tuple[int, ...], d: int) -> np.ndarray:
    """``pi[x]`` with ``X_p e_x = e_{pi[x]}`` on ``n`` replicas of dimension ``d``."""
    n = len(images)
    digits = np.indices((d,) * n).reshape(n, -1)  # digits[i, x] = x_i
    new = digits[list(images)]  # new_i = x_{p(i)}
    return np.ravel_multi_index(tuple(new), (d,) * n)


def replica_perm_matrix(p: Perm, d: int) -> np.ndarray:
    """Dense matrix of ``X_p`` (for tests and proportionality fits)."""
    pi = _perm_index(p.images, d)
    m = np.zeros((d ** p.size, d ** p.size))
    m[pi, np.arange(pi.size)] = 1.0
    return m


def left_perm(mat: np.ndarray, p: Perm, d: int) -> np.ndarray:
    """``X_p @ mat``."""
    out = np.empty_like(mat)
    out[_perm_index(p.images, d)] = mat
    return out


def right_perm(mat: np.ndarray, p: Perm, d: int) -> np.ndarray:
    """``mat @ X_p``."""
    return mat[:, _perm_index(p.images, d)]


def reflection(n: int) -> Perm:
    """Reflection ``i -> n - 1 - i`` of the replica circle."""
    return Perm(range(n - 1, -1, -1))


def species_swap_index(kept: list, n: int) -> np.ndarray:
    """Index map of ``V^{(x)n}`` where ``V`` exchanges a and b on every site."""
    pos = {l: i for i, l in enumerate(kept)}
    partner = [pos[(l[0], l[1], 1 - l[2])] for l in kept]
    k = len(kept)
    bits = np.indices((2,) * k).reshape(k, -1)
    new = np.empty_like(bits)
    new[partner] = bits
    single = np.ravel_multi_index(tuple(new), (2,) * k)
    d = 2**k
    digits = np.indices((d,) * n).reshape(n, -1)
    return np.ravel_multi_index(tuple(single[digits]), (d,) * n)


def e_map(mat: np.ndarray, n: int, d: int) -> np.ndarray:
    """``X_r X_{+1} Sigma X_r``."""
    r = reflection(n)
    return right_perm(left_perm(left_perm(mat, shift(n, 1), d), r, d), r, d)


def check_replica_generators(rt: ReplicaTensor, species_swap: bool = False) -> dict[str, float]:
    """Frobenius residuals of the replica maps on ``rt``.

    Keys: ``S``, ``H``, ``E`` and the separate pieces ``reflection_only`` and
    ``hermitian_only``.  With ``species_swap`` the E map is also tried after
    the local a/b exchange ``V``: ``E_lu_ket`` applies ``V`` on the ket side
    only, ``E_lu_both`` conjugates by ``V``.
    """
    m, n, d = rt.matrix, rt.n, rt.dim
    r = reflection(n)
    plus, minus = shift(n, 1), shift(n, -1)
    out = {
        "S": np.linalg.norm(right_perm(left_perm(m, plus, d), minus, d) - m),
        "H": np.linalg.norm(right_perm(left_perm(m.conj().T, r, d), r, d) - m),
        "reflection_only": np.linalg.norm(right_perm(left_perm(m, r, d), r, d) - m),
        "hermitian_only": np.linalg.norm(m.conj().T - m),
    }
    em = e_map(m, n, d)
    out["E"] = np.linalg.norm(em - m)
    if species_swap:
        v = species_swap_index(rt.kept, n)
        ket = np.empty_like(em)
        ket[v] = em
        out["E_lu_ket"] = np.linalg.norm(ket - m)
        both = ket[:, v]  # (ket @ V)[:, x] = ket[:, v[x]]
        out["E_lu_both"] = np.linalg.norm(both - m)
    return {k: float(v) for k, v in out.items()}


def proportionality(rt: ReplicaTensor, p: Perm) -> tuple[complex, float]:
    """Best ``c`` with ``Sigma ~ c X_p`` and the relative residual."""
    xp = replica_perm_matrix(p, rt.dim)
    c = np.vdot(xp, rt.matrix) / xp.shape[0]
    res = np.linalg.norm(rt.matrix - c * xp) / max(np.linalg.norm(rt.matrix), 1e-300)
    return complex(c), float(res)


def entropy_from_replica(rt: ReplicaTensor, region: list) -> float:
    """Conditional Renyi-``n`` entropy ``log2(tr[X_{+1}^P Sigma] / tr Sigma) / (1 - n)``.

    ``tr Sigma`` is the conditioning register's ``tr rho^n``, so the result
    equals ``S_n(P + A) - S_n(A)``.  Kept qubits outside ``region`` are traced
    out.
    """
    n, k = rt.n, len(rt.kept)
    idx = [rt.kept.index(l) for l in region]
    t = rt.matrix.reshape((2,) * (2 * n * k))
    # axes: ket replica i qubit j -> i*k + j ; bra -> n*k + i*k + j
    ket = [[i * k + j for j in range(k)] for i in range(n)]
    bra = [[n * k + i * k + j for j in range(k)] for i in range(n)]
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    sub = [None] * (2 * n * k)
    for j in range(k):
        if j in idx:
            # X_{+1} on P: contract bra of replica i with ket of replica i+1
            for i in range(n):
                c = next(letters)
                sub[bra[i][j]] = c
                sub[ket[(i + 1) % n][j]] = c
        else:
            for i in range(n):
                c = next(letters)
                sub[bra[i][j]] = c
                sub[ket[i][j]] = c
    val = np.einsum("".join(sub) + "->", t)
    norm = np.trace(rt.matrix)
    return float(np.log2(val.real / norm.real) / (1 - n))
