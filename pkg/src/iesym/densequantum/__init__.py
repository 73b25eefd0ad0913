"""Dense state-vector oracle for small probed circuits."""

from iesym.densequantum.checks import IeReport, check_ie_entropies, exchange_labels, exchange_residual
from iesym.densequantum.engine import run_circuit_dense, run_trajectory_dense, s_cond, s_env
from iesym.densequantum.kernel import (
    factorized_kernel,
    kernel_factorization_residual,
    replica_kernel,
    replica_kernel_factorization_check,
)
from iesym.densequantum.probes import apply_probe
from iesym.densequantum.replica import (
    ReplicaTensor,
    check_replica_generators,
    conditional_replica_tensor,
    entropy_from_replica,
    proportionality,
    replica_perm_matrix,
    replica_tensor_from_spec,
    replica_tensor_to_json,
)
from iesym.densequantum.state import (
    CapacityError,
    DenseState,
    bell_pairs,
    entropy,
    haar_unitary,
    renyi2_direct,
    renyi_entropy,
)

__all__ = [
    "CapacityError",
    "DenseState",
    "IeReport",
    "ReplicaTensor",
    "apply_probe",
    "bell_pairs",
    "check_ie_entropies",
    "check_replica_generators",
    "conditional_replica_tensor",
    "entropy",
    "entropy_from_replica",
    "exchange_labels",
    "exchange_residual",
    "factorized_kernel",
    "haar_unitary",
    "kernel_factorization_residual",
    "proportionality",
    "renyi2_direct",
    "renyi_entropy",
    "replica_kernel",
    "replica_kernel_factorization_check",
    "replica_perm_matrix",
    "replica_tensor_from_spec",
    "replica_tensor_to_json",
    "run_circuit_dense",
    "run_trajectory_dense",
    "s_cond",
    "s_env",
]
