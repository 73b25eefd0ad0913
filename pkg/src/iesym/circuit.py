"""Brickwork circuits with probe layers, as engine-independent op streams.

A circuit is described by :class:`CircuitSpec`.  :func:`initial_ops` and
:func:`layer_ops` expand it into primitive operations on qubit *labels*; the
dense and stabilizer engines both consume the same streams, which is what
makes cross-simulator checks meaningful.

Labels
------
``("S", x, k)``            system qubit of site ``x``, species ``k`` (0 = a, 1 = b)
``("R", x, k)``            reference copy of ``("S", x, k)`` (mixed initial state)
``("A", t, x, k)``         apparatus qubit written at layer ``t``
``("Ac", t, x, k)``        apparatus copy (Bell partner of an apparatus qubit)
``("E", t, x, k)``         environment qubit
``("Ea", t, x, k)``        environment purifier of a maximally mixed apparatus
``("Ee", t, x, k)``        environment purifier of a maximally mixed environment

The conditioning register is ``A + Ac`` and the complementary register is
``E + Ea + Ee``.

Ops
---
``("zero", q)``, ``("bell", q1, q2)``, ``("swap", q1, q2)``,
``("cnot", control, target)``, ``("gate", q1, q2, g)`` where ``g`` is a
Clifford index or ``("haar", seed)``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from iesym import _random

N_CLIFFORD2 = 11520  # order of the two-qubit Clifford group modulo phase

APPARATUS_ROLES = ("A", "Ac")
ENVIRONMENT_ROLES = ("E", "Ea", "Ee")

INITIAL_SYSTEM = ("pure_zero", "mixed_via_reference")
APPARATUS_INIT = ("pure_zero", "bell_with_copy")
ENVIRONMENT_INIT = ("pure_zero", "maximally_mixed")
PROBES = ("noisy_transduction", "transduction", "erasure_dual", "projective_measurement")
GATE_FAMILIES = ("clifford2_uniform", "haar")


class SpecError(ValueError):
    """Invalid circuit specification; the message names the offending field."""


@dataclass(frozen=True)
class CircuitSpec:
    """Brickwork circuit with a probe layer after every brick layer.

    Attributes:
        L: number of sites; each site holds an a and a b qubit.  Odd ``L``
            is accepted for small dense checks (see :func:`bricks`).
        T: number of layers.
        p: probe probability per site and layer.
        master_seed: root of all counter-based draws.
        initial_system: ``pure_zero`` or ``mixed_via_reference``.
        apparatus_init: ``pure_zero`` or ``bell_with_copy``.
        environment_init: ``pure_zero`` or ``maximally_mixed``.
        probe: probe kind applied at sites with a probe event.
        gate_family: ``clifford2_uniform``; ``haar`` is dense-engine only.
        e_sites, gap, p_sites: partition sizes (sites) for E_S, the gap and
            P_S.  ``None`` selects the default proportions.
        stride: record entropies every ``stride`` layers.
    """

    L: int
    T: int
    p: float
    master_seed: int
    initial_system: str = "pure_zero"
    apparatus_init: str = "pure_zero"
    environment_init: str = "pure_zero"
    probe: str = "noisy_transduction"
    gate_family: str = "clifford2_uniform"
    e_sites: int | None = None
    gap: int | None = None
    p_sites: int | None = None
    stride: int = 1

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or self.L < 2:
            raise SpecError(f"L: must be an integer >= 2, got {self.L!r}")
        if not isinstance(self.T, (int, np.integer)) or self.T < 0:
            raise SpecError(f"T: must be a non-negative integer, got {self.T!r}")
        if not 0.0 <= float(self.p) <= 1.0:
            raise SpecError(f"p: must lie in [0, 1], got {self.p!r}")
        if not isinstance(self.stride, (int, np.integer)) or self.stride < 1:
            raise SpecError(f"stride: must be a positive integer, got {self.stride!r}")
        for name, allowed in (("initial_system", INITIAL_SYSTEM), ("apparatus_init", APPARATUS_INIT),
                              ("environment_init", ENVIRONMENT_INIT), ("probe", PROBES),
                              ("gate_family", GATE_FAMILIES)):
            if getattr(self, name) not in allowed:
                raise SpecError(f"{name}: must be one of {allowed}, got {getattr(self, name)!r}")
        for name in ("e_sites", "gap", "p_sites"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, (int, np.integer)) or v < 0):
                raise SpecError(f"{name}: must be a non-negative integer, got {v!r}")

    # partition -------------------------------------------------------------
    def partition(self) -> tuple[list[int], list[int]]:
        """Sites of ``(E_S, P_S)``: E_S is leftmost, P_S rightmost.

        Default sizes are ``E_S = max(1, L // 8)``, ``gap = L // 4`` (0 for
        ``L < 8``) and ``P_S`` the rest.  ``P_S`` must exceed half the chain.
        """
        e = self.e_sites if self.e_sites is not None else max(1, self.L // 8)
        g = self.gap if self.gap is not None else (self.L // 4 if self.L >= 8 else 0)
        p = self.p_sites if self.p_sites is not None else self.L - e - g
        if e + g + p > self.L:
            raise SpecError(f"partition: e_sites + gap + p_sites = {e + g + p} exceeds L = {self.L}")
        if 2 * p <= self.L:
            raise SpecError(f"partition: p_sites = {p} must exceed L/2 = {self.L / 2}")
        return list(range(e)), list(range(self.L - p, self.L))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = float(self.p)
        return d

    def spec_hash(self) -> str:
        """Stable content hash of the spec."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def system_label(x: int, k: int) -> tuple:
    return ("S", x, k)


def system_labels(L: int) -> list[tuple]:
    return [("S", x, k) for x in range(L) for k in (0, 1)]


def reference_labels(L: int) -> list[tuple]:
    return [("R", x, k) for x in range(L) for k in (0, 1)]


def site_labels(role: str, sites) -> list[tuple]:
    return [(role, x, k) for x in sites for k in (0, 1)]


def initial_ops(spec: CircuitSpec) -> list[tuple]:
    ops = []
    for x in range(spec.L):
        for k in (0, 1):
            if spec.initial_system == "pure_zero":
                ops.append(("zero", ("S", x, k)))
            else:
                ops.append(("bell", ("S", x, k), ("R", x, k)))
    return ops


def bricks(L: int, t: int) -> list[tuple[int, int]]:
    """Site pairs acted on at layer ``t``: even layers start at 0, odd at 1.

    For even ``L`` the last odd-layer brick wraps around; for odd ``L`` one
    site per layer is idle and no brick wraps.
    """
    start = t % 2
    return [(x % L, (x + 1) % L) for x in range(start, start + L - 1, 2)]


def gate_draws(spec: CircuitSpec, t: int) -> list:
    """The two gates of each brick of layer ``t`` (Clifford indices or Haar seeds)."""
    sites = np.array([b[0] for b in bricks(spec.L, t)])
    if spec.gate_family == "clifford2_uniform":
        g = _random.randint(N_CLIFFORD2, spec.master_seed, _random.GATE, t, sites[:, None], np.arange(2)[None, :])
        return [(int(a), int(b)) for a, b in g]
    seeds = _random.counter_hash(spec.master_seed, _random.HAAR, t, sites[:, None], np.arange(2)[None, :])
    return [(("haar", int(a >> np.uint64(1))), ("haar", int(b >> np.uint64(1)))) for a, b in seeds]


def probe_events(spec: CircuitSpec, t: int) -> np.ndarray:
    """Boolean mask of probed sites at layer ``t``.

    The uniform draw does not depend on ``p``, so trajectories at different
    ``p`` share randomness and their event sets are nested.
    """
    u = _random.uniform(spec.master_seed, _random.ETA, t, np.arange(spec.L))
    return u < spec.p


def brick_ops(x: int, y: int, g1, g2) -> list[tuple]:
    """Four gates of an a/b symmetric brick on sites ``x, y``.

    ``g1`` acts on (x_a, y_a) and (x_b, y_b); ``g2`` acts on (x_a, y_b) and
    (x_b, y_a).  Exchanging a and b on both sites permutes these gates among
    commuting pairs, so the brick commutes with the a/b swap.
    """
    return [
        ("gate", ("S", x, 0), ("S", y, 0), g1),
        ("gate", ("S", x, 1), ("S", y, 1), g1),
        ("gate", ("S", x, 0), ("S", y, 1), g2),
        ("gate", ("S", x, 1), ("S", y, 0), g2),
    ]


def probe_dilation(kind: str, t: int, x: int, apparatus_init: str = "pure_zero",
                   environment_init: str = "pure_zero") -> list[tuple]:
    """Ops of one probe event of type ``kind`` at site ``x`` after layer ``t``."""
    sa, sb = ("S", x, 0), ("S", x, 1)
    ops: list[tuple] = []
    if kind == "noisy_transduction":
        a, e = ("A", t, x, 0), ("E", t, x, 0)
        if apparatus_init == "pure_zero":
            ops.append(("zero", a))
        else:
            ops.append(("bell", a, ("Ac", t, x, 0)))
        if environment_init == "pure_zero":
            ops.append(("zero", e))
        else:
            ops.append(("bell", e, ("Ee", t, x, 0)))
        ops += [("swap", sa, e), ("swap", sb, a)]
    elif kind == "transduction":
        a = ("A", t, x, 0)
        ops += [("bell", a, ("Ea", t, x, 0)), ("swap", sb, a)]
    elif kind == "erasure_dual":
        a, e = ("A", t, x, 0), ("E", t, x, 0)
        ops += [("bell", e, a), ("swap", sa, e)]
    elif kind == "projective_measurement":
        for k, s in ((0, sa), (1, sb)):
            a, e = ("A", t, x, k), ("E", t, x, k)
            ops += [("zero", a), ("zero", e), ("cnot", s, a), ("cnot", s, e)]
    else:
        raise ValueError(f"probe: must be one of {PROBES}, got {kind!r}")
    return ops


def probe_ops(spec: CircuitSpec, t: int, x: int) -> list[tuple]:
    """Ops of one probe event at site ``x`` after layer ``t``."""
    return probe_dilation(spec.probe, t, x, spec.apparatus_init, spec.environment_init)


def layer_ops(spec: CircuitSpec, t: int) -> list[tuple]:
    """Brick layer ``U_t`` followed by probe layer ``V_t``."""
    ops: list[tuple] = []
    for (x, y), (g1, g2) in zip(bricks(spec.L, t), gate_draws(spec, t)):
        ops += brick_ops(x, y, g1, g2)
    for x in np.flatnonzero(probe_events(spec, t)):
        ops += probe_ops(spec, t, int(x))
    return ops


def circuit_ops(spec: CircuitSpec) -> Iterator[tuple[int, list[tuple]]]:
    """``(layer, ops)`` pairs, layer ``-1`` being the initial state preparation."""
    yield -1, initial_ops(spec)
    for t in range(spec.T):
        yield t, layer_ops(spec, t)


def role_of(label: tuple) -> str:
    return label[0]


def is_conditioning(label: tuple) -> bool:
    return label[0] in APPARATUS_ROLES


def is_environment(label: tuple) -> bool:
    return label[0] in ENVIRONMENT_ROLES


@dataclass
class Sample:
    layer: int
    observable: str
    value: float
    partition: str = ""


@dataclass
class TrajectoryRecord:
    """Observables recorded along one trajectory."""

    spec: CircuitSpec
    engine: str
    samples: list[Sample] = field(default_factory=list)

    @property
    def spec_hash(self) -> str:
        return self.spec.spec_hash()

    def to_json(self) -> str:
        return json.dumps({
            "spec": self.spec.to_dict(),
            "spec_hash": self.spec_hash,
            "engine": self.engine,
            "samples": [[s.layer, s.observable, s.value, s.partition] for s in self.samples],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TrajectoryRecord":
        d = json.loads(text)
        spec = CircuitSpec(**d["spec"])
        if spec.spec_hash() != d["spec_hash"]:
            raise ValueError("spec hash mismatch")
        return cls(spec, d["engine"], [Sample(*s) for s in d["samples"]])

    def series(self, observable: str) -> tuple[np.ndarray, np.ndarray]:
        rows = [(s.layer, s.value) for s in self.samples if s.observable == observable]
        if not rows:
            return np.zeros(0, dtype=int), np.zeros(0)
        arr = np.array(rows)
        return arr[:, 0].astype(int), arr[:, 1]
