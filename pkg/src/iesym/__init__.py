"""Apparatus/environment exchange symmetry in probed random circuits.

Subpackages:
    permrep: permutation algebra, Weingarten tables and brick weights.
    densequantum: dense state-vector oracle and replica tensors.
    stabcore: stabilizer simulation of probed Clifford brickwork circuits.
    pottsrbc: Swendsen-Wang simulation of the random-bond-cluster model.
    labctl: sweeps, persistence and finite-size analysis.
"""

__version__ = "0.1.0"
