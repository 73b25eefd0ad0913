"""One-step replica kernels of channels without an apparatus.

A step couples the system to fresh environment qubits through a unitary and
discards the environment.  On ``n`` replicas the step acts as
``Sigma -> tr_E[U^{(x)n} (Sigma (x) rho_E^{(x)n}) U^{dagger (x)n}]``.  Without
apparatus conditioning this superoperator is the ``n``-fold tensor power of
the single-copy channel; the two routes below compute it independently.
"""

from __future__ import annotations

import numpy as np


def _channel_apply(u: np.ndarray, rho_env: np.ndarray, sigma: np.ndarray, ds: int, n: int) -> np.ndarray:
    """Apply the replicated step to an operator ``sigma`` on ``n`` system copies."""
    de = rho_env.shape[0]
    # full operator on (S1..Sn, E1..En)
    env = rho_env
    for _ in range(n - 1):
        env = np.kron(env, rho_env)
    full = np.kron(sigma, env)
    # U^{(x)n} in the (S1..Sn, E1..En) ordering
    u4 = u.reshape(ds, de, ds, de)
    big = u4
    for _ in range(n - 1):
        big = np.multiply.outer(big, u4)
    # big axes: (s_out0, e_out0, s_in0, e_in0, s_out1, ...)
    axes_out = [4 * i for i in range(n)] + [4 * i + 1 for i in range(n)]
    axes_in = [4 * i + 2 for i in range(n)] + [4 * i + 3 for i in range(n)]
    big = np.transpose(big, axes_out + axes_in).reshape(ds**n * de**n, ds**n * de**n)
    out = big @ full @ big.conj().T
    out = out.reshape(ds**n, de**n, ds**n, de**n)
    return np.einsum("aebe->ab", out)


def replica_kernel(u: np.ndarray, ds: int, rho_env: np.ndarray, n: int) -> np.ndarray:
    """Superoperator matrix of the replicated step, built from its definition.

    Operators are vectorized row-major: ``vec(X)[i * D + j] = X[i, j]`` with
    ``D = ds**n``.
    """
    d = ds**n
    k = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            k[:, i * d + j] = _channel_apply(u, rho_env, e, ds, n).reshape(-1)
    return k


def factorized_kernel(u: np.ndarray, ds: int, rho_env: np.ndarray, n: int) -> np.ndarray:
    """Same superoperator assembled as the ``n``-fold tensor power of one copy."""
    k1 = replica_kernel(u, ds, rho_env, 1).reshape(ds, ds, ds, ds)  # (i', j', i, j)
    big = k1
    for _ in range(n - 1):
        big = np.multiply.outer(big, k1)
    # axes (i'_0, j'_0, i_0, j_0, i'_1, ...) -> (i'_0..i'_{n-1}, j'_0.., i_0.., j_0..)
    order = ([4 * r for r in range(n)] + [4 * r + 1 for r in range(n)]
             + [4 * r + 2 for r in range(n)] + [4 * r + 3 for r in range(n)])
    d = ds**n
    return np.transpose(big, order).reshape(d * d, d * d)


def kernel_factorization_residual(u: np.ndarray, ds: int, rho_env: np.ndarray, n: int) -> float:
    """Max entry difference between the direct and the factorized kernels."""
    return float(np.abs(replica_kernel(u, ds, rho_env, n) - factorized_kernel(u, ds, rho_env, n)).max())


def replica_kernel_factorization_check(u: np.ndarray, ds: int, rho_env: np.ndarray, n: int) -> float:
    """Frobenius norm of the difference between the direct and factorized kernels."""
    if (ds * rho_env.shape[0]) ** (2 * n) > 1 << 24:
        from iesym.densequantum.state import CapacityError

        raise CapacityError("replicated step too large for an explicit kernel")
    return float(np.linalg.norm(replica_kernel(u, ds, rho_env, n) - factorized_kernel(u, ds, rho_env, n)))
