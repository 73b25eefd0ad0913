import itertools
import json

import numpy as np
import pytest

from iesym.circuit import CircuitSpec, bricks, gate_draws, system_labels
from iesym.densequantum import (
    CapacityError,
    DenseState,
    apply_probe,
    bell_pairs,
    check_ie_entropies,
    check_replica_generators,
    conditional_replica_tensor,
    entropy,
    entropy_from_replica,
    exchange_residual,
    haar_unitary,
    kernel_factorization_residual,
    proportionality,
    renyi2_direct,
    renyi_entropy,
    replica_kernel,
    replica_kernel_factorization_check,
    replica_perm_matrix,
    replica_tensor_from_spec,
    replica_tensor_to_json,
    run_circuit_dense,
    run_trajectory_dense,
    s_cond,
    s_env,
)
from iesym.permrep import Perm, shift, symmetric_group, weingarten_table
from iesym.stabcore import clifford_unitary

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def site_with_reference():
    return bell_pairs(2, [(("S", 0, 0), ("R", 0, 0)), (("S", 0, 1), ("R", 0, 1))])


def ab_symmetric_gate(seed):
    """Two-qubit gate commuting with the a/b exchange: exp(i th SWAP) (u x u)."""
    u = haar_unitary(2, seed)
    th = 0.3 + seed
    return (np.cos(th) * np.eye(4) + 1j * np.sin(th) * SWAP) @ np.kron(u, u)


# bell pairs and entropies ---------------------------------------------------


def test_bell_pair_entropies():
    one = bell_pairs(1)
    assert entropy(one, [("B", 0, 0)]) == pytest.approx(1.0)
    assert entropy(one, [("B", 0, 0), ("B", 0, 1)]) == pytest.approx(0.0, abs=1e-12)
    two = bell_pairs(2)
    assert entropy(two, [("B", 0, 0), ("B", 1, 1)]) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        bell_pairs(0)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_renyi_of_maximally_mixed(n):
    st = bell_pairs(3)
    region = [("B", i, 0) for i in range(3)]
    assert renyi_entropy(st, region, n) == pytest.approx(3.0)
    assert renyi_entropy(st, [("B", 0, 1)], n) == pytest.approx(1.0)


def random_state(k, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(2,) * k) + 1j * rng.normal(size=(2,) * k)
    return DenseState(list(range(k)), psi / np.linalg.norm(psi))


def test_renyi2_two_routes_agree():
    st = random_state(8, 0)
    for region in ([0], [1, 4], [0, 2, 5, 7], list(range(6))):
        assert abs(renyi_entropy(st, region, 2) - renyi2_direct(st, region)) < 1e-10


def test_renyi_monotone_and_complementary():
    st = random_state(7, 1)
    for size in range(1, 7):
        for region in itertools.combinations(range(7), size):
            vals = [renyi_entropy(st, region, n) for n in (1, 2, 3, 4)]
            assert all(a >= b - 1e-10 for a, b in zip(vals, vals[1:]))
            rest = [q for q in range(7) if q not in region]
            assert abs(vals[1] - renyi_entropy(st, rest, 2)) < 1e-9


def test_empty_region_has_zero_entropy():
    assert entropy(random_state(3, 2), []) == 0.0


def test_state_json_roundtrip():
    st = site_with_reference()
    back = DenseState.from_json(st.to_json())
    assert back.labels == st.labels
    assert np.array_equal(back.psi, st.psi)


# haar sampling --------------------------------------------------------------


def test_haar_unitary_is_unitary():
    for d in (2, 3, 4, 8):
        u = haar_unitary(d, d)
        assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


def test_haar_first_moment():
    d, m = 3, 10_000
    rng = np.random.Generator(np.random.Philox(key=11))
    acc = np.zeros((d, d, d, d), dtype=complex)
    for _ in range(m):
        u = haar_unitary(d, rng)
        acc += np.einsum("ij,kl->ijkl", u, u.conj())
    acc /= m
    expect = np.einsum("ik,jl->ijkl", np.eye(d), np.eye(d)) / d
    assert np.max(np.abs(acc - expect)) < 2e-2


def test_haar_second_moment_matches_weingarten():
    d, m = 2, 10_000
    rng = np.random.Generator(np.random.Philox(key=12))
    acc = np.zeros((d,) * 8, dtype=complex)
    for _ in range(m):
        u = haar_unitary(d, rng)
        acc += np.einsum("ab,cd,ef,gh->abcdefgh", u, u, u.conj(), u.conj())
    acc /= m
    # E[U_{i1 j1} U_{i2 j2} U*_{k1 l1} U*_{k2 l2}] = sum_{s,t} d(i = k o s) d(j = l o t) Wg
    group = symmetric_group(2)
    wg = np.vectorize(float)(weingarten_table(d, 2))
    expect = np.zeros_like(acc)
    for idx in itertools.product(range(d), repeat=8):
        i1, j1, i2, j2, k1, l1, k2, l2 = idx
        i, j, k, l = (i1, i2), (j1, j2), (k1, k2), (l1, l2)
        val = 0.0
        for a, s in enumerate(group):
            for b, t in enumerate(group):
                if all(i[x] == k[s(x)] for x in range(2)) and all(j[x] == l[t(x)] for x in range(2)):
                    val += wg[a, b]
        expect[idx] = val
    assert np.max(np.abs(acc - expect)) < 5e-2


# probes -----------------------------------------------------------------------


def test_projective_probe_records_weights():
    amp = np.array([0.6, 0.8j])
    st = DenseState().add_zero(("S", 0, 0)).add_zero(("S", 0, 1))
    st = st.apply_1q(("S", 0, 0), np.array([[amp[0], -np.conj(amp[1])], [amp[1], np.conj(amp[0])]]))
    st = apply_probe(st, "projective_measurement", 0)
    rho = st.reduced_density_matrix([("S", 0, 0), ("A", 0, 0, 0)])
    assert np.allclose(rho, np.diag([0.36, 0, 0, 0.64]), atol=1e-12)


def test_projective_probe_on_eigenstate():
    st = DenseState().add_zero(("S", 0, 0)).add_zero(("S", 0, 1))
    out = apply_probe(st, "projective_measurement", 0)
    assert abs(out.psi.reshape(-1)[0]) == pytest.approx(1.0)


def test_noisy_transduction_on_bell_halves():
    st = apply_probe(site_with_reference(), "noisy_transduction", 0)
    assert entropy(st, [("A", 0, 0, 0)]) == pytest.approx(1.0)
    assert entropy(st, [("E", 0, 0, 0)]) == pytest.approx(1.0)


def test_probe_errors():
    st = site_with_reference()
    with pytest.raises(ValueError):
        apply_probe(st, "weak_measurement", 0)
    with pytest.raises(ValueError):
        apply_probe(st, "noisy_transduction", 3)
    twice = apply_probe(st, "noisy_transduction", 0)
    with pytest.raises(ValueError):
        apply_probe(twice, "noisy_transduction", 0)


# circuits -------------------------------------------------------------------


def test_zero_layers_is_initial_state():
    st = run_circuit_dense(CircuitSpec(L=2, T=0, p=0.0, master_seed=0, initial_system="mixed_via_reference"))
    assert entropy(st, system_labels(2)) == pytest.approx(4.0)
    pure = run_circuit_dense(CircuitSpec(L=2, T=0, p=0.0, master_seed=0))
    assert abs(pure.psi.reshape(-1)[0]) == pytest.approx(1.0)


def test_no_probes_means_no_coupling():
    spec = CircuitSpec(L=2, T=3, p=0.0, master_seed=4, initial_system="mixed_via_reference")
    st = run_circuit_dense(spec)
    assert not [l for l in st.labels if l[0] in ("A", "E")]
    assert s_cond(st, []) == 0.0
    assert s_cond(st, system_labels(2)) == pytest.approx(4.0)


def hand_built_l2_t2_p1(spec):
    """Independent contraction of the L=2, T=2, p=1 noisy-transduction circuit.

    Qubit axes are named explicitly and swaps are applied as SWAP gates.
    """
    names = ["s0a", "s0b", "s1a", "s1b"]
    psi = np.zeros((2,) * 4, dtype=complex)
    psi[(0,) * 4] = 1.0

    def gate(u, q1, q2):
        nonlocal psi
        a, b = names.index(q1), names.index(q2)
        out = np.tensordot(u.reshape(2, 2, 2, 2), psi, axes=([2, 3], [a, b]))
        psi = np.moveaxis(out, [0, 1], [a, b])

    for t in range(2):
        (x, y), = bricks(2, t)
        (g1, g2), = gate_draws(spec, t)
        u1, u2 = clifford_unitary(g1), clifford_unitary(g2)
        gate(u1, f"s{x}a", f"s{y}a")
        gate(u1, f"s{x}b", f"s{y}b")
        gate(u2, f"s{x}a", f"s{y}b")
        gate(u2, f"s{x}b", f"s{y}a")
        for site in (0, 1):
            for role in ("A", "E"):
                psi = np.multiply.outer(psi, np.array([1, 0], dtype=complex))
                names.append(f"{role}{t}{site}")
            gate(SWAP, f"s{site}a", f"E{t}{site}")
            gate(SWAP, f"s{site}b", f"A{t}{site}")
    return names, psi


def test_l2_t2_p1_matches_hand_contraction():
    spec = CircuitSpec(L=2, T=2, p=1.0, master_seed=17)
    names, psi = hand_built_l2_t2_p1(spec)
    oracle = DenseState(names, psi)
    st = run_circuit_dense(spec)
    label = {f"s{x}{'ab'[k]}": ("S", x, k) for x in (0, 1) for k in (0, 1)}
    for t in (0, 1):
        for x in (0, 1):
            label[f"A{t}{x}"] = ("A", t, x, 0)
            label[f"E{t}{x}"] = ("E", t, x, 0)
    regions = [["A00", "A01", "A10", "A11"], ["E00", "E01", "E10", "E11"], ["s0a", "s0b"],
               ["s0a", "s0b", "s1a", "s1b", "A00", "A01", "A10", "A11"], ["A10", "E11"], ["A00"]]
    for region in regions:
        for n in (1, 2):
            assert entropy(st, [label[r] for r in region], n) == pytest.approx(entropy(oracle, region, n), abs=1e-10)


def test_trajectory_record_shape():
    spec = CircuitSpec(L=2, T=2, p=0.5, master_seed=1, initial_system="mixed_via_reference")
    st, rec = run_trajectory_dense(spec)
    layers, values = rec.series("C")
    assert list(layers) == [0, 1, 2]
    assert values[0] == pytest.approx(4.0)
    assert st.n_qubits <= 24


def test_capacity_guard():
    with pytest.raises(CapacityError):
        run_circuit_dense(CircuitSpec(L=8, T=2, p=1.0, master_seed=0))


def test_norm_preserved():
    st = run_circuit_dense(CircuitSpec(L=3, T=3, p=0.5, master_seed=2, gate_family="haar"))
    assert abs(st.norm() - 1.0) < 1e-10


# entropy identities --------------------------------------------------------------


@pytest.mark.parametrize("seed", range(3))
def test_measurement_circuit_identities(seed):
    spec = CircuitSpec(L=2, T=2, p=0.6, master_seed=seed, probe="projective_measurement",
                       initial_system="mixed_via_reference")
    rep = check_ie_entropies(run_circuit_dense(spec))
    assert rep.passed(1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_noisy_transduction_identities(seed):
    spec = CircuitSpec(L=2, T=3, p=0.5, master_seed=seed, initial_system="mixed_via_reference")
    rep = check_ie_entropies(run_circuit_dense(spec), n_list=(1, 2, 3))
    assert rep.ie_deviation < 1e-9
    assert rep.purity_deviation < 1e-9
    assert rep.positive


def test_noisy_transduction_identities_haar_and_odd_size():
    spec = CircuitSpec(L=3, T=2, p=0.5, master_seed=9, initial_system="mixed_via_reference", gate_family="haar")
    assert check_ie_entropies(run_circuit_dense(spec)).passed(1e-9)


def test_transduction_breaks_identity():
    devs = []
    for seed in range(10):
        spec = CircuitSpec(L=2, T=3, p=0.5, master_seed=seed, initial_system="mixed_via_reference",
                           probe="transduction")
        devs.append(check_ie_entropies(run_circuit_dense(spec), n_list=(1, 2)).ie_deviation)
    assert sum(d > 0.1 for d in devs) >= 8


def test_exchange_residual_for_measurement():
    spec = CircuitSpec(L=2, T=2, p=1.0, master_seed=0, probe="projective_measurement")
    assert exchange_residual(run_circuit_dense(spec), swap_species=False) < 1e-12


def test_s_cond_and_s_env_agree_under_symmetry():
    spec = CircuitSpec(L=2, T=2, p=0.7, master_seed=5, initial_system="mixed_via_reference")
    st = run_circuit_dense(spec)
    for x in (0, 1):
        reg = [("S", x, 0), ("S", x, 1)]
        assert abs((s_cond(st, reg) - s_cond(st, [])) - (s_env(st, reg) - s_env(st, []))) < 1e-9


# replica tensors -----------------------------------------------------------------


def test_unconditioned_tensor_factorizes():
    st = run_circuit_dense(CircuitSpec(L=2, T=2, p=0.6, master_seed=3))
    rt = conditional_replica_tensor(st, 2, conditioning=[])
    rho = st.reduced_density_matrix(rt.kept)
    assert np.allclose(rt.matrix, np.kron(rho, rho), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_replica_entropies_match_direct(n):
    st = run_circuit_dense(CircuitSpec(L=2, T=3, p=0.4, master_seed=2))
    rt = conditional_replica_tensor(st, n)
    app = [l for l in st.labels if l[0] in ("A", "Ac")]
    for region in ([("S", 0, 0)], [("S", 0, 0), ("S", 1, 1)], system_labels(2)):
        direct = entropy(st, region + app, n) - entropy(st, app, n)
        assert entropy_from_replica(rt, region) == pytest.approx(direct, abs=1e-9)


def measurement_site_state(seed):
    st = site_with_reference()
    for t in range(2):
        st = st.apply_2q(("S", 0, 0), ("S", 0, 1), haar_unitary(4, seed * 10 + t))
        st = apply_probe(st, "projective_measurement", 0, layer=t)
    return st


@pytest.mark.parametrize("n", [2, 3])
def test_measurement_generators(n):
    rt = conditional_replica_tensor(measurement_site_state(1), n)
    res = check_replica_generators(rt)
    assert res["S"] < 1e-9 and res["H"] < 1e-9 and res["E"] < 1e-9


def test_measurement_shift_invariance_two_replicas():
    rt = conditional_replica_tensor(measurement_site_state(2), 2)
    x = replica_perm_matrix(shift(2, 1), rt.dim)
    assert np.linalg.norm(x @ rt.matrix - rt.matrix) < 1e-9


def single_transduction_state():
    st = DenseState().add_bell(("S", 0, 0), ("R", 0, 0)).add_bell(("A", 0, 0, 0), ("Ac", 0, 0, 0))
    return st.swap(("S", 0, 0), ("A", 0, 0, 0))


@pytest.mark.parametrize("n", [2, 3])
def test_single_transduction_tensor_is_a_cyclic_shift(n):
    rt = conditional_replica_tensor(single_transduction_state(), n)
    # orientation: with X_p |x_1..x_n> = |x_p(1)..x_p(n)> the tensor is X_{+1}^T = X_{-1}
    _, res = proportionality(rt, shift(n, -1))
    assert res < 1e-12
    gens = check_replica_generators(rt)
    assert gens["S"] < 1e-12 and gens["H"] < 1e-12
    if n == 3:
        assert gens["reflection_only"] > 0.1 and gens["hermitian_only"] > 0.1
    else:
        assert gens["reflection_only"] < 1e-12


def noisy_site_state(seed):
    st = site_with_reference()
    for t in range(2):
        st = st.apply_2q(("S", 0, 0), ("S", 0, 1), ab_symmetric_gate(seed * 7 + t))
        st = apply_probe(st, "noisy_transduction", 0, layer=t)
    return st


def test_noisy_transduction_e_generator_conventions():
    rt = conditional_replica_tensor(noisy_site_state(0), 2, )
    res = check_replica_generators(rt, species_swap=True)
    print("noisy transduction E residuals:", {k: f"{v:.2e}" for k, v in res.items() if k.startswith("E")})
    assert res["E_lu_both"] < 1e-9
    assert res["E_lu_ket"] > 0.1


def test_pure_input_noisy_transduction_all_generators():
    for seed in (2, 4):
        rt = replica_tensor_from_spec(CircuitSpec(L=2, T=3, p=0.4, master_seed=seed), 3)
        res = check_replica_generators(rt, species_swap=True)
        assert max(res["S"], res["H"], res["E"]) < 1e-9


def test_replica_capacity():
    st = run_circuit_dense(CircuitSpec(L=2, T=1, p=0.0, master_seed=0, initial_system="mixed_via_reference"))
    with pytest.raises(CapacityError):
        conditional_replica_tensor(st, 2)


def test_replica_json():
    rt = conditional_replica_tensor(single_transduction_state(), 2)
    d = json.loads(replica_tensor_to_json(rt))
    m = np.array(d["matrix"])
    assert d["n"] == 2 and np.allclose(m[..., 0] + 1j * m[..., 1], rt.matrix)


def test_perm_matrix_convention():
    # X_p |x_1 x_2 x_3> = |x_p(1) x_p(2) x_p(3)>
    p = Perm([1, 2, 0])
    x = replica_perm_matrix(p, 2)
    src = 0b100  # x_1 = 1
    assert np.flatnonzero(x[:, src]).tolist() == [0b001]


# kernels -------------------------------------------------------------------------


def test_kernel_without_environment():
    u = haar_unitary(2, 5)
    env = np.ones((1, 1))
    assert replica_kernel_factorization_check(u, 2, env, 2) < 1e-12
    k = replica_kernel(u, 2, env, 2)
    uu = np.kron(u, u)
    assert np.allclose(k, np.kron(uu, uu.conj()), atol=1e-12)


def test_kernel_erasure_two_replicas():
    u = haar_unitary(4, 6)
    env = np.diag([1.0, 0.0])
    assert replica_kernel_factorization_check(u, 2, env, 2) < 1e-10
    assert kernel_factorization_residual(SWAP, 2, env, 2) < 1e-12


def test_kernel_trace_preserving():
    u = haar_unitary(4, 7)
    k = replica_kernel(u, 2, np.diag([0.3, 0.7]), 1)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    y = (k @ x.reshape(-1)).reshape(2, 2)
    assert abs(np.trace(y) - np.trace(x)) < 1e-10


def test_kernel_capacity():
    with pytest.raises(CapacityError):
        replica_kernel_factorization_check(np.eye(64), 8, np.ones((8, 8)) / 8, 3)
