"""Running circuit specs on the dense simulator."""

from __future__ import annotations

from iesym.circuit import (
    CircuitSpec,
    TrajectoryRecord,
    circuit_ops,
    is_conditioning,
    is_environment,
)
from iesym.densequantum.state import DenseState, entropy
from iesym.observables import layer_samples, record_layer


def conditioning_labels(state: DenseState) -> list:
    return [l for l in state.labels if is_conditioning(l)]


def environment_labels(state: DenseState) -> list:
    return [l for l in state.labels if is_environment(l)]


def s_cond(state: DenseState, region, n: float = 1) -> float:
    """Entropy of ``region`` joined with the conditioning register."""
    return entropy(state, list(region) + conditioning_labels(state), n)


def s_env(state: DenseState, region, n: float = 1) -> float:
    """Entropy of ``region`` joined with the environment register."""
    return entropy(state, list(region) + environment_labels(state), n)


def run_circuit_dense(spec: CircuitSpec, layers: int | None = None) -> DenseState:
    """Final state ``|U_T>`` of a circuit spec (optionally after fewer layers)."""
    stop = spec.T if layers is None else layers
    state = DenseState()
    for t, ops in circuit_ops(spec):
        if t >= stop:
            break
        state = state.apply_ops(ops)
    return state


def run_trajectory_dense(spec: CircuitSpec) -> tuple[DenseState, TrajectoryRecord]:
    """Run a spec and record its observables at the configured stride."""
    rec = TrajectoryRecord(spec, "dense")
    state = DenseState()
    for t, ops in circuit_ops(spec):
        state = state.apply_ops(ops)
        done = t + 1
        if record_layer(spec, done):
            rec.samples += layer_samples(lambda r: s_cond(state, r), spec, done)
    return state, rec
