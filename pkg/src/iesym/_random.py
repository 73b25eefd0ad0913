"""Counter-based random draws.

Every random number used by the simulators is a pure function of a tuple of
integer keys, typically ``(master_seed, stream, layer, site, k)``.  This keeps
trajectories reproducible independently of evaluation order, worker count or
which subset of layers is replayed.
"""

from __future__ import annotations

import numpy as np

# stream tags
GATE = 1
ETA = 2
HAAR = 3
REALIZATION = 4
POTTS = 5
CIRCUIT = 6
BOOTSTRAP = 7

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array."""
    x = x + _GOLDEN
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def counter_hash(*keys) -> np.ndarray:
    """Hash a tuple of integer keys (scalars or broadcastable arrays) to uint64."""
    arrays = np.broadcast_arrays(*[np.asarray(k, dtype=np.int64) for k in keys])
    h = np.zeros(arrays[0].shape, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for a in arrays:
            h = _mix(h ^ a.astype(np.uint64))
    return h


def uniform(*keys) -> np.ndarray:
    """Uniform doubles in [0, 1) keyed by ``keys``."""
    return (counter_hash(*keys) >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def randint(n: int, *keys) -> np.ndarray:
    """Integers in ``[0, n)`` keyed by ``keys`` (bias below 1e-12 for n < 2**13)."""
    return ((counter_hash(*keys) >> np.uint64(11)) % np.uint64(n)).astype(np.int64)


def derive_seed(*keys) -> int:
    """A single 63-bit seed derived from ``keys``."""
    return int(counter_hash(*keys).reshape(-1)[0] >> np.uint64(1))


def generator(*keys) -> np.random.Generator:
    """A numpy Generator on a Philox stream keyed by ``keys``."""
    h = counter_hash(*keys).reshape(-1)[0]
    return np.random.Generator(np.random.Philox(key=int(h)))
