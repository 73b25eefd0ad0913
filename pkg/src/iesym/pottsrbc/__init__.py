"""Swendsen-Wang simulation of the random-bond-cluster model on brickwork lattices."""

from iesym.pottsrbc.critical import locate_critical, size_curves
from iesym.pottsrbc.exact import es_distribution, exact_bond_density, state_code
from iesym.pottsrbc.lattice import (
    FIXED_IDENTITY,
    FIXED_SHIFT,
    FREE,
    GeometryError,
    RbcLattice,
    build_lattice,
    final_tags,
    nu_from_p,
    nu_prime_from_p,
    self_dual_point,
)
from iesym.pottsrbc.sampler import (
    OBSERVABLES,
    ChainResult,
    InvariantViolation,
    RbcParams,
    binder,
    measure,
    run_chain,
    sw_sweep,
)

__all__ = [
    "FIXED_IDENTITY",
    "FIXED_SHIFT",
    "FREE",
    "OBSERVABLES",
    "ChainResult",
    "GeometryError",
    "InvariantViolation",
    "RbcLattice",
    "RbcParams",
    "binder",
    "build_lattice",
    "es_distribution",
    "exact_bond_density",
    "final_tags",
    "locate_critical",
    "measure",
    "nu_from_p",
    "nu_prime_from_p",
    "run_chain",
    "self_dual_point",
    "size_curves",
    "state_code",
    "sw_sweep",
]
