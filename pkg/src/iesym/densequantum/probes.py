"""Probe dilations applied to existing dense states."""

from __future__ import annotations

from iesym.circuit import PROBES, probe_dilation
from iesym.densequantum.state import DenseState


def apply_probe(state: DenseState, kind: str, site: int, layer: int = 0, apparatus_init: str = "pure_zero",
                environment_init: str = "pure_zero") -> DenseState:
    """Allocate fresh apparatus/environment qubits and apply the probe's unitary dilation.

    Raises:
        ValueError: unknown ``kind``, missing system qubits at ``site``, or
            probe qubits of this ``(layer, site)`` already present.
    """
    if kind not in PROBES:
        raise ValueError(f"kind: must be one of {PROBES}, got {kind!r}")
    for k in (0, 1):
        if not state.has(("S", site, k)):
            raise ValueError(f"site: no system qubit ('S', {site}, {k}) in the register")
    ops = probe_dilation(kind, layer, site, apparatus_init, environment_init)
    for op in ops:
        if op[0] in ("zero", "bell"):
            for label in op[1:]:
                if state.has(label):
                    raise ValueError(f"probe qubit {label!r} already allocated")
    return state.apply_ops(ops)
