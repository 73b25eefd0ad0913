"""Entropy identities on dense states.

For a probed circuit whose apparatus and environment play interchangeable
roles, conditioning on the apparatus and conditioning on the environment give
the same entropies for site-aligned regions.  :func:`check_ie_entropies`
measures how far a state is from that, together with the purity relation and
positivity of the conditional entropy that follow from it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from iesym.densequantum.engine import conditioning_labels, environment_labels
from iesym.densequantum.state import DenseState, renyi_from_spectrum

POSITIVITY_TOL = 1e-9


def site_partitions(state: DenseState) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All ``(P_S, P_S')`` pairs of site subsets present in ``state``."""
    s_sites = sorted({l[1] for l in state.labels if l[0] == "S"})
    r_sites = sorted({l[1] for l in state.labels if l[0] == "R"})

    def subsets(sites):
        return [c for k in range(len(sites) + 1) for c in itertools.combinations(sites, k)]

    return [(a, b) for a in subsets(s_sites) for b in subsets(r_sites)]


def _region(state: DenseState, s_sites, r_sites) -> list:
    return [l for l in state.labels if (l[0] == "S" and l[1] in s_sites) or (l[0] == "R" and l[1] in r_sites)]


@dataclass
class IeReport:
    """Deviations from the entropy identities.

    Attributes:
        ie_deviation: max over partitions and orders of
            ``|S(P|A) - S(P|E)|``.
        purity_deviation: max of ``|S(P|A) - S(P^c|A)|``.
        min_conditional_entropy: smallest von Neumann ``S(P|A)`` seen.
        details: per ``(partition, n)`` tuples ``(S(P|A), S(P|E), S(P^c|A))``.
    """

    ie_deviation: float
    purity_deviation: float
    min_conditional_entropy: float
    details: dict = field(default_factory=dict)

    @property
    def positive(self) -> bool:
        return self.min_conditional_entropy >= -POSITIVITY_TOL

    def passed(self, tol: float = 1e-9) -> bool:
        return self.ie_deviation < tol and self.purity_deviation < tol and self.positive


def check_ie_entropies(state: DenseState, n_list: Iterable[float] = (1, 2, 3),
                       partitions: Sequence | None = None) -> IeReport:
    """Evaluate the apparatus/environment entropy identities on ``state``."""
    n_list = list(n_list)
    app = conditioning_labels(state)
    env = environment_labels(state)
    s_sites = sorted({l[1] for l in state.labels if l[0] == "S"})
    r_sites = sorted({l[1] for l in state.labels if l[0] == "R"})
    if partitions is None:
        partitions = site_partitions(state)
    cache: dict[frozenset, np.ndarray] = {}

    def spec_of(region):
        key = frozenset(region)
        if key not in cache:
            cache[key] = state.spectrum(list(region))
        return cache[key]

    def s(region, n):
        return renyi_from_spectrum(spec_of(region), n)

    ie = pur = 0.0
    pos = np.inf
    details = {}
    for ps, pr in partitions:
        reg = _region(state, ps, pr)
        comp = _region(state, [x for x in s_sites if x not in ps], [x for x in r_sites if x not in pr])
        for n in n_list:
            sa = s(reg + app, n) - s(app, n)
            se = s(reg + env, n) - s(env, n)
            sc = s(comp + app, n) - s(app, n)
            ie = max(ie, abs(sa - se))
            pur = max(pur, abs(sa - sc))
            if n == 1:
                pos = min(pos, sa)
            details[(tuple(ps), tuple(pr), n)] = (sa, se, sc)
    return IeReport(ie, pur, float(pos) if np.isfinite(pos) else 0.0, details)


def exchange_labels(state: DenseState, swap_species: bool) -> DenseState:
    """Relabel apparatus <-> environment (and optionally a <-> b on S and R).

    Apparatus copies pair with environment purifiers of the same slot.
    """
    pair = {"A": "E", "E": "A", "Ac": "Ee", "Ee": "Ac"}
    mapping = {}
    for l in state.labels:
        if l[0] in pair:
            mapping[l] = (pair[l[0]],) + tuple(l[1:])
        elif swap_species and l[0] in ("S", "R"):
            mapping[l] = (l[0], l[1], 1 - l[2])
    for k, v in mapping.items():
        if not state.has(v):
            raise ValueError(f"exchange partner {v!r} of {k!r} missing")
    return state.permute_labels(mapping)


def exchange_residual(state: DenseState, swap_species: bool) -> float:
    """``1 - |<psi| X |psi>|`` for the apparatus/environment exchange ``X``."""
    return 1.0 - abs(state.overlap(exchange_labels(state, swap_species)))
