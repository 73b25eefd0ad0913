"""Stabilizer trajectories of probed brickwork circuits.

Apparatus and environment qubits are never acted on after their probe event,
so their tableau columns are frozen.  The column span of the conditioning
register is therefore kept as an incremental GF(2) basis, and any entropy of
the form ``S(X + A)`` costs only the reduction of X's columns against it.
"""

from __future__ import annotations

import numpy as np

from iesym.circuit import (
    CircuitSpec,
    TrajectoryRecord,
    circuit_ops,
    is_conditioning,
    is_environment,
    layer_ops,
    site_labels,
)
from iesym.observables import layer_samples, record_layer
from iesym.stabcore.clifford import named_clifford
from iesym.stabcore.gf2 import basis_insert, extension_rank
from iesym.stabcore.tableau import InvariantError, Tableau


class ColumnBasis:
    """Reduced GF(2) basis of a growing set of frozen tableau columns."""

    def __init__(self, words: int):
        self.vecs = np.zeros((64, words), dtype=np.uint64)
        self.piv_w = np.zeros(64, dtype=np.int64)
        self.piv_m = np.zeros(64, dtype=np.uint64)
        self.size = 0
        self.qubits = 0

    def _fit(self, rows: int, words: int) -> None:
        cap, w = self.vecs.shape
        if rows <= cap and words <= w:
            return
        new_cap = max(cap, 1)
        while new_cap < rows:
            new_cap *= 2
        vecs = np.zeros((new_cap, max(w, words)), dtype=np.uint64)
        vecs[:cap, :w] = self.vecs
        self.vecs = vecs
        for name in ("piv_w", "piv_m"):
            old = getattr(self, name)
            arr = np.zeros(new_cap, dtype=old.dtype)
            arr[:cap] = old
            setattr(self, name, arr)

    def add(self, cols: np.ndarray, n_qubits: int) -> None:
        nw = cols.shape[1]
        self._fit(self.size + cols.shape[0], nw)
        for v in cols:
            v = np.ascontiguousarray(v.copy())
            self.size = basis_insert(self.vecs, self.piv_w, self.piv_m, self.size, v, nw)
        self.qubits += n_qubits

    def extension(self, cols: np.ndarray) -> int:
        nw = cols.shape[1]
        self._fit(self.size, nw)
        return int(extension_rank(self.vecs, self.piv_w, self.piv_m, self.size, np.ascontiguousarray(cols), nw))


class StabilizerRun:
    """Labelled stabilizer register consuming circuit op streams."""

    def __init__(self, capacity: int = 64):
        self.tab = Tableau(capacity)
        self.col: dict = {}
        self.frozen: set = set()
        self._pending: list = []
        self.cond = ColumnBasis(self.tab.words)
        self.env = ColumnBasis(self.tab.words)
        self._cnot = named_clifford("cnot")

    # ops -----------------------------------------------------------------
    def _q(self, label) -> int:
        if label in self.frozen:
            raise InvariantError(f"op on frozen qubit {label!r}")
        return self.col[label]

    def _new(self, label, q: int) -> None:
        if label in self.col:
            raise ValueError(f"label {label!r} already allocated")
        self.col[label] = q
        if is_conditioning(label) or is_environment(label):
            self._pending.append(label)

    def apply_ops(self, ops) -> None:
        q1s, q2s, cids = [], [], []

        def flush():
            if cids:
                self.tab.apply_many(q1s, q2s, cids)
                q1s.clear()
                q2s.clear()
                cids.clear()

        for op in ops:
            kind = op[0]
            if kind == "gate":
                q1s.append(self._q(op[1]))
                q2s.append(self._q(op[2]))
                if isinstance(op[3], tuple):
                    raise ValueError("stabilizer engine needs Clifford gates")
                cids.append(int(op[3]))
                continue
            if kind == "cnot":
                q1s.append(self._q(op[1]))
                q2s.append(self._q(op[2]))
                cids.append(self._cnot)
                continue
            flush()
            if kind == "zero":
                self._new(op[1], self.tab.add_zero())
            elif kind == "bell":
                q1, q2 = self.tab.add_bell()
                self._new(op[1], q1)
                self._new(op[2], q2)
            elif kind == "swap":
                a, b = self._q(op[1]), self._q(op[2])
                self.col[op[1]], self.col[op[2]] = b, a
            else:
                raise ValueError(f"unknown op {kind!r}")
        flush()

    def end_layer(self) -> None:
        """Freeze the apparatus and environment qubits created since the last call."""
        for label in self._pending:
            q = self.col[label]
            basis = self.cond if is_conditioning(label) else self.env
            basis.add(self.tab.column_vectors([q]), 1)
            self.frozen.add(label)
        self._pending.clear()

    # entropies -------------------------------------------------------------
    def entropy(self, labels) -> int:
        return self.tab.entropy([self.col[l] for l in labels])

    def _joint(self, basis: ColumnBasis, labels) -> int:
        if self._pending:
            raise RuntimeError("call end_layer() before conditional entropies")
        labels = list(labels)
        rank = basis.size
        if labels:
            rank += basis.extension(self.tab.column_vectors([self.col[l] for l in labels]))
        return rank - basis.qubits - len(labels)

    def s_cond(self, labels) -> int:
        """``S(labels + A)`` with A the conditioning register."""
        return self._joint(self.cond, labels)

    def s_env(self, labels) -> int:
        """``S(labels + E)`` with E the environment register."""
        return self._joint(self.env, labels)

    def labels(self, predicate) -> list:
        return [l for l in self.col if predicate(l)]


def step(run: StabilizerRun, spec: CircuitSpec, t: int) -> None:
    """Apply brick layer ``t`` and its probe layer."""
    run.apply_ops(layer_ops(spec, t))
    run.end_layer()


def ie_violation(run: StabilizerRun, spec: CircuitSpec) -> int:
    """Max of ``|S(P|A) - S(P|E)|`` over single sites and both halves (integer bits)."""
    half = spec.L // 2
    regions = [[x] for x in range(spec.L)] + [list(range(half)), list(range(half, spec.L))]
    base_a, base_e = run.s_cond([]), run.s_env([])
    worst = 0
    for sites in regions:
        reg = site_labels("S", sites)
        worst = max(worst, abs((run.s_cond(reg) - base_a) - (run.s_env(reg) - base_e)))
    return worst


def run_trajectory(spec: CircuitSpec, debug: bool = False) -> TrajectoryRecord:
    """Simulate ``spec`` and record its observables at the configured stride.

    With ``debug`` the tableau invariants and the apparatus/environment
    entropy identity are checked after every layer.
    """
    if spec.gate_family != "clifford2_uniform":
        raise ValueError("gate_family: stabilizer engine supports clifford2_uniform only")
    if spec.L % 2:
        raise ValueError(f"L: stabilizer experiments need even L, got {spec.L}")
    rec = TrajectoryRecord(spec, "stab")
    run = StabilizerRun(capacity=4 * spec.L + 64)
    for t, ops in circuit_ops(spec):
        run.apply_ops(ops)
        run.end_layer()
        done = t + 1
        if debug:
            run.tab.check_invariants()
            if spec.probe in ("noisy_transduction", "projective_measurement") and ie_violation(run, spec):
                raise InvariantError(f"IE entropy identity violated at layer {done}")
        if record_layer(spec, done):
            rec.samples += layer_samples(run.s_cond, spec, done)
    return rec


def run_state(spec: CircuitSpec, layers: int | None = None) -> StabilizerRun:
    """Final stabilizer register of ``spec`` (optionally after fewer layers)."""
    run = StabilizerRun(capacity=4 * spec.L + 64)
    stop = spec.T if layers is None else layers
    for t, ops in circuit_ops(spec):
        if t >= stop:
            break
        run.apply_ops(ops)
        run.end_layer()
    return run
