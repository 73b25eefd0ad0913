"""Observables shared by the dense and stabilizer engines.

Both engines expose ``s_cond(labels)``: the entropy (bits) of ``labels``
together with the whole conditioning register.  Everything here is written in
terms of that one primitive.
"""

from __future__ import annotations

from typing import Callable, Sequence

from iesym.circuit import CircuitSpec, Sample, site_labels, system_labels


def conditional_mutual_information(s_cond: Callable[[Sequence], float], p_region, e_region) -> float:
    """``I(P : E | A) = S(PA) + S(EA) - S(PEA) - S(A)``."""
    return s_cond(p_region) + s_cond(e_region) - s_cond(list(p_region) + list(e_region)) - s_cond([])


def coherent_information(s_cond: Callable[[Sequence], float], system) -> float:
    """``S(S A) - S(A)``; for a reference-purified input this is the retained information."""
    return s_cond(system) - s_cond([])


def layer_samples(s_cond: Callable[[Sequence], float], spec: CircuitSpec, layer: int) -> list[Sample]:
    """Observables recorded once ``layer`` layers have run.

    ``O`` (pure input) is the conditional mutual information between P_S and
    E_S; ``C`` (reference input) is the coherent information of the system.
    ``S_cond`` is the entropy of the conditioning register alone.
    """
    out = [Sample(layer, "S_cond", float(s_cond([])))]
    if spec.initial_system == "pure_zero":
        try:
            e_sites, p_sites = spec.partition()
        except ValueError:
            return out
        val = conditional_mutual_information(s_cond, site_labels("S", p_sites), site_labels("S", e_sites))
        out.append(Sample(layer, "O", float(val), f"E{len(e_sites)}P{len(p_sites)}"))
    else:
        out.append(Sample(layer, "C", float(coherent_information(s_cond, system_labels(spec.L)))))
    return out


def record_layer(spec: CircuitSpec, completed: int) -> bool:
    """Whether observables are recorded once ``completed`` layers have run.

    Samples are labelled by the number of completed layers, so 0 is the
    initial state and ``T`` the final one; both are always recorded.
    """
    return completed % spec.stride == 0 or completed == spec.T
