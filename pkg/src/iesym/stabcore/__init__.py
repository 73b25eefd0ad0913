"""Stabilizer simulation of probed Clifford brickwork circuits."""

from iesym.stabcore.clifford import (
    N_CLIFFORD2,
    clifford_index,
    clifford_tables,
    clifford_unitary,
    named_clifford,
    uniform_clifford2,
)
from iesym.stabcore.experiment import StabilizerRun, ie_violation, run_state, run_trajectory, step
from iesym.stabcore.gf2 import gf2_rank
from iesym.stabcore.tableau import InvariantError, Tableau

__all__ = [
    "N_CLIFFORD2",
    "InvariantError",
    "StabilizerRun",
    "Tableau",
    "clifford_index",
    "clifford_tables",
    "clifford_unitary",
    "gf2_rank",
    "ie_violation",
    "named_clifford",
    "run_state",
    "run_trajectory",
    "step",
    "uniform_clifford2",
]
