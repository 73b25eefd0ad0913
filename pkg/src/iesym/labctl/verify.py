"""Fast invariant and oracle checks behind ``labctl verify``."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np


class CheckFailed(AssertionError):
    pass


def _weingarten():
    from iesym.permrep import gram_matrix, weingarten_table

    for n in (1, 2, 3):
        for d in range(max(2, n), 5):
            prod = gram_matrix(d, n).dot(weingarten_table(d, n))
            if not np.array_equal(prod, np.eye(prod.shape[0], dtype=int).astype(object) * Fraction(1)):
                raise CheckFailed(f"Q W != 1 for d={d}, n={n}")


def _centralizer():
    from math import factorial

    from iesym.permrep import centralizer_of_swap, max_cycle_bound, w_plus_set

    for n in (1, 2, 3, 4):
        if len(centralizer_of_swap(n)) != 2**n * factorial(n):
            raise CheckFailed(f"centralizer size wrong at n={n}")
        if max_cycle_bound(n) != n + 1:
            raise CheckFailed(f"cycle bound wrong at n={n}")
    if w_plus_set(2)[1] != 2:
        raise CheckFailed("h(2) != 2")


def _cross_engine():
    from iesym.circuit import CircuitSpec
    from iesym.densequantum import run_trajectory_dense
    from iesym.stabcore import run_trajectory

    for seed in range(5):
        spec = CircuitSpec(L=4, T=3, p=0.3, master_seed=seed)
        a = run_trajectory(spec, debug=True).samples
        b = run_trajectory_dense(spec)[1].samples
        for sa, sb in zip(a, b):
            if sa.observable != sb.observable or abs(sa.value - sb.value) > 1e-9:
                raise CheckFailed(f"stab/dense mismatch at seed {seed}: {sa} vs {sb}")


def _ie_symmetry():
    from iesym.circuit import CircuitSpec
    from iesym.densequantum import check_ie_entropies, run_circuit_dense

    for seed in range(5):
        spec = CircuitSpec(L=2, T=3, p=0.5, master_seed=seed, initial_system="mixed_via_reference")
        rep = check_ie_entropies(run_circuit_dense(spec))
        if not rep.passed(1e-9):
            raise CheckFailed(f"IE identities violated at seed {seed}: {rep.ie_deviation:.3g}")


def _edwards_sokal():
    from iesym.pottsrbc import RbcParams, build_lattice, exact_bond_density, run_chain

    lat = build_lattice(4, 2)
    res = run_chain(lat, RbcParams(2, 0.5, sweeps=20000, thermalization=100, seed=1))
    x = res.series("bond_density")
    exact = exact_bond_density(lat, 2, 0.5)
    err = x.std(ddof=1) / np.sqrt(x.size) * 3
    if abs(x.mean() - exact) > 5 * err + 1e-3:
        raise CheckFailed(f"bond density {x.mean():.4f} vs exact {exact:.4f}")


CHECKS: dict[str, Callable[[], None]] = {
    "weingarten_inverse": _weingarten,
    "centralizer_and_w_plus": _centralizer,
    "stab_dense_equivalence": _cross_engine,
    "ie_entropy_identities": _ie_symmetry,
    "edwards_sokal_bond_density": _edwards_sokal,
}


def run_checks(echo=print) -> bool:
    ok = True
    for name, fn in CHECKS.items():
        try:
            fn()
            echo(f"PASS {name}")
        except CheckFailed as exc:
            ok = False
            echo(f"FAIL {name}: {exc}")
    return ok
