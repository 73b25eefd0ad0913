"""Permutations of replica indices, Gram and Weingarten tables, brick weights.

Conventions
-----------
* Permutations act on ``{0, ..., m-1}`` internally and print in 1-based cycle
  notation, e.g. ``Perm.from_cycles(3, [(1, 2)])`` prints as ``(1 2)``.
* Composition is right to left: ``compose(p, q)(x) == p(q(x))``.
* On ``S_{2n}`` the replica ``a_i`` has index ``i`` and ``b_i`` has index
  ``n + i`` (0-based ``i``).
* Tables over ``S_m`` use the lexicographic order of the image tuples, which
  is also the order of :func:`itertools.permutations`.
"""

from __future__ import annotations

import itertools
import json
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

__all__ = [
    "Perm",
    "DegeneracyError",
    "CapacityError",
    "compose",
    "cycle_count",
    "symmetric_group",
    "permutation_array",
    "cycle_counts_array",
    "swap_ab",
    "shift",
    "shift_b",
    "shift_all",
    "gram_matrix",
    "weingarten_class_function",
    "weingarten_table",
    "centralizer_of_swap",
    "w_plus_set",
    "max_cycle_bound",
    "symmetric_cycle_decompose",
    "brick_weight",
    "brick_weight_table",
    "weingarten_json",
    "w_plus_json",
]


class DegeneracyError(ValueError):
    """Raised when a Gram matrix is singular (dimension below replica count)."""

    def __init__(self, d, n):
        super().__init__(f"Gram matrix is singular for d={d}, n={n} (requires d >= n)")
        self.d = d
        self.n = n


class CapacityError(ValueError):
    """Raised when a request exceeds the enumeration caps below."""


MAX_GROUP_DEGREE = 10  # exhaustive enumerations of S_m
MAX_TABLE_DEGREE = 6  # dense Gram/Weingarten tables over S_m
MAX_BRICK_REPLICAS = 3  # brick weights live on S_{2n}


def _require(value: int, cap: int, what: str) -> None:
    if value > cap:
        raise CapacityError(f"{what} = {value} exceeds the cap {cap}")


class Perm:
    """Immutable permutation of ``{0, ..., m-1}`` stored as its image tuple."""

    __slots__ = ("_img",)

    def __init__(self, images: Iterable[int]):
        img = tuple(int(i) for i in images)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation: {img}")
        self._img = img

    @classmethod
    def identity(cls, m: int) -> "Perm":
        return cls(range(m))

    @classmethod
    def from_cycles(cls, m: int, cycles: Iterable[Sequence[int]], one_based: bool = True) -> "Perm":
        """Build from disjoint cycles, e.g. ``[(1, 2, 3)]`` maps 1->2->3->1."""
        img = list(range(m))
        seen = set()
        off = 1 if one_based else 0
        for cyc in cycles:
            cyc = [c - off for c in cyc]
            if seen.intersection(cyc) or len(set(cyc)) != len(cyc):
                raise ValueError("cycles are not disjoint")
            seen.update(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(img)

    @property
    def size(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple[int, ...]:
        return self._img

    def __call__(self, x: int) -> int:
        return self._img[x]

    def __len__(self) -> int:
        return len(self._img)

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self._img == other._img

    def __lt__(self, other: "Perm") -> bool:
        return self._img < other._img

    def __hash__(self) -> int:
        return hash(self._img)

    def __mul__(self, other: "Perm") -> "Perm":
        return compose(self, other)

    def inverse(self) -> "Perm":
        inv = [0] * len(self._img)
        for i, j in enumerate(self._img):
            inv[j] = i
        return Perm(inv)

    def cycles(self, include_fixed: bool = True) -> list[tuple[int, ...]]:
        """Disjoint cycles (0-based), each starting at its smallest element."""
        seen = [False] * len(self._img)
        out = []
        for start in range(len(self._img)):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self._img[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self._img[j]
            if include_fixed or len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def cycle_count(self) -> int:
        """Number of cycles, fixed points included."""
        return len(self.cycles())

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def conjugate(self, g: "Perm") -> "Perm":
        """``g * self * g^-1``."""
        return compose(compose(g, self), g.inverse())

    def __repr__(self) -> str:
        cyc = self.cycles(include_fixed=False)
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(c + 1) for c in cy) + ")" for cy in cyc)


def compose(p: Perm, q: Perm) -> Perm:
    """Return ``p * q`` with ``(p * q)(x) = p(q(x))``."""
    if p.size != q.size:
        raise ValueError("size mismatch")
    pi = p.images
    return Perm(pi[j] for j in q.images)


def cycle_count(p: Perm) -> int:
    return p.cycle_count()


@lru_cache(maxsize=None)
def symmetric_group(m: int) -> tuple[Perm, ...]:
    """All elements of ``S_m`` in canonical (lexicographic) order."""
    return tuple(Perm(t) for t in itertools.permutations(range(m)))


@lru_cache(maxsize=4)
def _perm_array_cached(m: int) -> np.ndarray:
    if m == 0:
        return np.zeros((1, 0), dtype=np.int8)
    prev = _perm_array_cached(m - 1)
    blocks = []
    base = np.arange(m, dtype=np.int8)
    for first in range(m):
        rest = np.delete(base, first)
        block = np.empty((prev.shape[0], m), dtype=np.int8)
        block[:, 0] = first
        block[:, 1:] = rest[prev]
        blocks.append(block)
    out = np.concatenate(blocks)
    out.setflags(write=False)
    return out


def permutation_array(m: int) -> np.ndarray:
    """All of ``S_m`` as an ``(m!, m)`` int8 array of images, lexicographic order."""
    _require(m, MAX_GROUP_DEGREE, "group degree m")
    return _perm_array_cached(m)


def cycle_counts_array(perms: np.ndarray) -> np.ndarray:
    """Cycle counts of every row of an array of permutations."""
    perms = np.asarray(perms)
    k, m = perms.shape
    rows = np.arange(k)[:, None]
    cur = np.broadcast_to(np.arange(m), (k, m)).copy()
    orbit_min = cur.copy()
    for _ in range(m - 1):
        cur = perms[rows, cur]
        np.minimum(orbit_min, cur, out=orbit_min)
    return (orbit_min == np.arange(m)).sum(axis=1)


def _index_of(images: Sequence[int]) -> int:
    """Lexicographic rank of a permutation."""
    return int(_rank_array(np.asarray(images)[None, :])[0])


def _rank_array(rows: np.ndarray) -> np.ndarray:
    """Lexicographic ranks of the rows of a permutation array (Lehmer code)."""
    rows = np.asarray(rows, dtype=np.int64)
    m = rows.shape[-1]
    flat = rows.reshape(-1, m)
    rank = np.zeros(flat.shape[0], dtype=np.int64)
    fact = 1
    for pos in range(m - 1, -1, -1):
        smaller_after = (flat[:, pos + 1 :] < flat[:, pos : pos + 1]).sum(axis=1)
        rank += smaller_after * fact
        fact *= m - pos
    return rank.reshape(rows.shape[:-1])


# Replica-labelled elements -------------------------------------------------


def swap_ab(n: int) -> Perm:
    """The a/b exchange ``prod_i (a_i b_i)`` on ``S_{2n}``."""
    return Perm([n + i for i in range(n)] + list(range(n)))


def shift(n: int, k: int = 1) -> Perm:
    """Cyclic shift ``i -> i + k (mod n)`` on ``S_n``."""
    return Perm((i + k) % n for i in range(n))


def shift_b(n: int, k: int = 1) -> Perm:
    """Cyclic shift on the b replicas only; ``k=+1`` maps ``b_i -> b_{i+1}``."""
    return Perm(list(range(n)) + [n + (i + k) % n for i in range(n)])


def shift_all(n: int, k: int = 1) -> Perm:
    """Cyclic shift on both the a and the b replicas of ``S_{2n}``."""
    return Perm([(i + k) % n for i in range(n)] + [n + (i + k) % n for i in range(n)])


# Gram and Weingarten --------------------------------------------------------


def gram_matrix(d, n: int) -> np.ndarray:
    """``Q[tau, sigma] = d ** cycle_count(tau * sigma^-1)`` over ``S_n``.

    ``d`` may be an int, a Fraction or a sympy expression; the result is an
    object array in canonical element order.
    """
    _require(n, MAX_TABLE_DEGREE, "copies n")
    perms = permutation_array(n).astype(np.int64)
    inv = np.argsort(perms, axis=1)
    k = perms.shape[0]
    # (tau * sigma^-1)(x) = tau[sigma^-1[x]]
    prod = perms[np.arange(k)[:, None, None], inv[None, :, :]]
    counts = cycle_counts_array(prod.reshape(k * k, n)).reshape(k, k)
    powers = {c: d**c for c in range(n + 1)}
    out = np.empty((k, k), dtype=object)
    for c, v in powers.items():
        mask = counts == c
        if mask.any():
            out[mask] = v
    return out


@lru_cache(maxsize=None)
def _class_data(n: int):
    """Class structure of ``S_n`` used to invert central elements."""
    perms = permutation_array(n).astype(np.int64)
    counts = cycle_counts_array(perms)
    types = [Perm(p).cycle_type() for p in perms]
    classes = sorted(set(types), reverse=True)
    cls_index = {t: i for i, t in enumerate(classes)}
    type_idx = np.array([cls_index[t] for t in types])
    reps = [types.index(t) for t in classes]
    inv = np.argsort(perms, axis=1)
    ncls = len(classes)
    # N[k, l, c] = #{h : cycles(h) = c, class(h^-1 g_k) = l}
    table = np.zeros((ncls, ncls, n + 1), dtype=np.int64)
    for k, r in enumerate(reps):
        g = perms[r]
        hinv_g = np.take_along_axis(inv, np.broadcast_to(g, inv.shape), axis=1)  # h^-1(g(x))
        idx = _rank_array(hinv_g)
        np.add.at(table, (k, type_idx[idx], counts), 1)
    return classes, type_idx, table


def _solve(a: list[list], b: list) -> list:
    """Gaussian elimination over an exact field (Fraction or sympy)."""
    m = len(a)
    aug = [list(row) + [bb] for row, bb in zip(a, b)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[-1] for row in aug]


def weingarten_class_function(d, n: int) -> dict[tuple[int, ...], object]:
    """Weingarten function on ``S_n`` as a map cycle type -> exact value.

    ``Q`` is a central element of the group algebra, so its inverse is a
    class function.  The inverse is found by solving the convolution identity
    ``sum_h Q(h) Wg(h^-1 g) = delta(g)`` on one representative per class.
    """
    if isinstance(d, int):
        d = Fraction(d)
    classes, _, table = _class_data(n)
    ncls = len(classes)
    powers = [d**c for c in range(n + 1)]
    a = [[sum(int(table[k, l, c]) * powers[c] for c in range(n + 1) if table[k, l, c]) for l in range(ncls)]
         for k in range(ncls)]
    ident = classes.index(tuple([1] * n))
    b = [Fraction(1) if k == ident else Fraction(0) for k in range(ncls)]
    try:
        sol = _solve(a, b)
    except ZeroDivisionError:
        raise DegeneracyError(d, n) from None
    if hasattr(d, "free_symbols"):
        import sympy

        sol = [sympy.factor(sympy.simplify(s)) for s in sol]
    return dict(zip(classes, sol))


def weingarten_table(d, n: int) -> np.ndarray:
    """Exact inverse of :func:`gram_matrix` as an object array of Fractions.

    Raises :class:`DegeneracyError` when ``d < n``, where the Gram matrix is
    singular.
    """
    _require(n, MAX_TABLE_DEGREE, "copies n")
    if isinstance(d, int) and d < n:
        raise DegeneracyError(d, n)
    wg = weingarten_class_function(d, n)
    classes, type_idx, _ = _class_data(n)
    values = np.empty(len(classes), dtype=object)
    for i, c in enumerate(classes):
        values[i] = wg[c]
    perms = permutation_array(n).astype(np.int64)
    inv = np.argsort(perms, axis=1)
    k = perms.shape[0]
    # W[tau, sigma] = Wg(tau * sigma^-1)
    prod = perms[np.arange(k)[:, None, None], inv[None, :, :]]  # tau[sigma^-1[x]]
    return values[type_idx[_rank_array(prod)]]


# Centralizer and W_plus ---------------------------------------------------


def _centralizer_array(n: int) -> np.ndarray:
    _require(2 * n, MAX_GROUP_DEGREE, "group degree 2n")
    perms = permutation_array(2 * n)
    s = np.array(swap_ab(n).images, dtype=np.int8)
    mask = np.all(perms[:, s] == s[perms], axis=1)
    return perms[mask]


def centralizer_of_swap(n: int) -> list[Perm]:
    """All ``g`` in ``S_{2n}`` with ``g s g^-1 = s`` for the a/b swap ``s``.

    Found by exhaustive enumeration of ``S_{2n}`` (feasible for ``n <= 5``).
    """
    return [Perm(row) for row in _centralizer_array(n)]


def _w_plus_counts(n: int) -> tuple[np.ndarray, np.ndarray]:
    cent = _centralizer_array(n).astype(np.int64)
    m1 = np.array(shift_b(n, -1).images)
    counts = cycle_counts_array(cent[:, m1])  # sigma * (-1)_b
    return cent, counts


def w_plus_set(n: int) -> tuple[list[Perm], int]:
    """Centralizer elements attaining ``n + 1`` cycles in ``sigma * (-1)_b``, and their number ``h``.

    The cycle count of ``sigma * x`` equals that of ``x * sigma`` (they are
    conjugate), so the composition order does not matter here.
    """
    cent, counts = _w_plus_counts(n)
    members = [Perm(row) for row in cent[counts == n + 1]]
    return members, len(members)


def max_cycle_bound(n: int) -> int:
    """Largest cycle count of ``sigma * (-1)_b`` over the centralizer."""
    _, counts = _w_plus_counts(n)
    return int(counts.max())


def symmetric_cycle_decompose(c: Perm, n: int) -> tuple[Perm, Perm, int]:
    """Split an a/b-symmetric cycle as ``c = s_r * c1 * c2``.

    ``c`` must be a single nontrivial cycle on ``S_{2n}`` with ``s c s = c``.
    Returns ``(c1, c2, r)`` with ``c2 = s c1 s``, disjoint supports and
    ``s_r = (a_r b_r)``.  The result is checked by recomposition.
    """
    s = swap_ab(n)
    if c.size != 2 * n:
        raise ValueError("cycle must live on S_2n")
    nontrivial = c.cycles(include_fixed=False)
    if len(nontrivial) != 1:
        raise ValueError(f"{c} is not a single cycle")
    if c.conjugate(s) != c:
        raise ValueError(f"{c} is not a/b symmetric")
    cyc = nontrivial[0]
    m = len(cyc)
    half = m // 2
    # label the cycle so that s(x_i) = x_{i + m/2}
    x = list(cyc)
    for i in range(m):
        if s(x[i]) != x[(i + half) % m]:
            raise AssertionError("a/b swap does not act as the half rotation")
    r = x[0] if x[0] < n else x[0] - n
    c1 = Perm.from_cycles(2 * n, [x[:half]] if half > 1 else [], one_based=False)
    c2 = Perm.from_cycles(2 * n, [x[half:]] if half > 1 else [], one_based=False)
    s_r = Perm.from_cycles(2 * n, [(r, n + r)], one_based=False)
    if compose(s_r, compose(c1, c2)) != c or c1.conjugate(s) != c2:
        raise AssertionError("recomposition failed")
    return c1, c2, r


# Brick weights ------------------------------------------------------------


def _as_float(table: np.ndarray) -> np.ndarray:
    return np.vectorize(float, otypes=[np.float64])(table)


@lru_cache(maxsize=32)
def _brick_pair_matrix(q: int, n: int) -> np.ndarray:
    """``M[tau_t, sigma_b] = Q(tau_t, sigma_b) * Q(s tau_t s, sigma_b)`` on ``S_{2n}``."""
    m = 2 * n
    perms = permutation_array(m).astype(np.int64)
    s = np.array(swap_ab(n).images)
    conj = s[perms][:, s]  # s * tau * s  (s is an involution)
    conj_idx = _rank_array(conj)
    gram = gram_matrix(q, m)
    return gram * gram[conj_idx, :]


def brick_weight_table(q: int, n: int, exact: bool = True) -> np.ndarray:
    """Full ``W_Brick^{q,n}`` table over ``S_{2n} x S_{2n}``.

    ``W_Brick(sigma, tau) = sum W(sigma, tau_t) W(sigma_b, tau) Q(tau_t, sigma_b)
    Q(s tau_t s, sigma_b)`` with ``W`` the Weingarten table at dimension
    ``q**2`` and ``Q`` the Gram table at dimension ``q``.  Exact mode returns
    Fractions.  Float mode converts the exact ingredient tables to float64
    before the two matrix products; it is meant for ``2n = 6``.
    """
    _require(n, MAX_BRICK_REPLICAS, "replicas n")
    wg = weingarten_table(q * q, 2 * n)
    pair = _brick_pair_matrix(q, n)
    if exact:
        return wg.dot(pair).dot(wg)
    logger.info("brick weight q=%d n=%d evaluated in float64", q, n)
    w = _as_float(wg)
    return w @ _as_float(pair) @ w


def brick_weight(q: int, n: int, sigma: Perm, tau: Perm, exact: bool = True):
    """Single entry of :func:`brick_weight_table`."""
    _require(n, MAX_BRICK_REPLICAS, "replicas n")
    m = 2 * n
    if sigma.size != m or tau.size != m:
        raise ValueError("permutations must live on S_2n")
    wg = weingarten_table(q * q, m)
    pair = _brick_pair_matrix(q, n)
    i, j = _index_of(sigma.images), _index_of(tau.images)
    if exact:
        return wg[i, :].dot(pair).dot(wg[:, j])
    return float((_as_float(wg[i : i + 1, :]) @ _as_float(pair) @ _as_float(wg[:, j : j + 1]))[0, 0])


# Export -------------------------------------------------------------------


def _rational(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def weingarten_json(d: int, n: int) -> str:
    """``{cycle notation of g: "num/den"}`` for ``Wg(g)`` over ``S_n``, canonical order."""
    wg = weingarten_class_function(d, n)
    out = {repr(g): _rational(wg[g.cycle_type()]) for g in symmetric_group(n)}
    return json.dumps({"d": d, "n": n, "weingarten": out}, indent=1)


def w_plus_json(n: int) -> str:
    """Members of ``W_+`` on ``S_{2n}`` in cycle notation, with ``h`` and the cycle bound."""
    members, h = w_plus_set(n)
    return json.dumps({"n": n, "h": h, "max_cycles": max_cycle_bound(n),
                       "w_plus": [repr(g) for g in sorted(members)]}, indent=1)
