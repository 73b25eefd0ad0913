"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The summary section at the end of a pytest run lists every criterion.
Criteria 6 and 7 take minutes.
"""

import math
import time
from math import factorial

import numpy as np

from iesym.circuit import CircuitSpec
from iesym.densequantum import (
    DenseState,
    apply_probe,
    bell_pairs,
    check_ie_entropies,
    check_replica_generators,
    conditional_replica_tensor,
    entropy,
    haar_unitary,
    replica_perm_matrix,
    replica_tensor_from_spec,
    run_circuit_dense,
    run_trajectory_dense,
)
from iesym.labctl.analysis import crossing_analysis, load_dataset
from iesym.labctl.config import validate
from iesym.labctl.sweep import run_sweep
from iesym.permrep import (
    DegeneracyError,
    brick_weight_table,
    centralizer_of_swap,
    gram_matrix,
    max_cycle_bound,
    shift,
    symmetric_group,
    w_plus_set,
    weingarten_table,
)
from iesym.pottsrbc import locate_critical, self_dual_point
from iesym.stabcore import Tableau, clifford_unitary, run_trajectory

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


# 1. group and Weingarten ---------------------------------------------------------


def exact_identity_product(q, w):
    """``Q W == I`` in exact integer arithmetic (common denominator of ``W``)."""
    den = math.lcm(*{f.denominator for f in w.ravel()})
    wi = np.array([[int(f * den) for f in row] for row in w], dtype=object)
    prod = np.dot(np.asarray(q, dtype=object), wi)
    return bool(np.array_equal(prod, np.eye(prod.shape[0], dtype=int).astype(object) * den))


def test_criterion_1_group_and_weingarten(criterion):
    t0 = time.time()
    failures = []
    checked, degenerate = [], []
    for m in range(1, 7):
        for d in range(2, 7):
            if d < m:
                # the Gram matrix has rank < m! and no inverse exists
                try:
                    weingarten_table(d, m)
                    failures.append(f"no DegeneracyError for d={d}, m={m}")
                except DegeneracyError:
                    degenerate.append((d, m))
                continue
            if not exact_identity_product(gram_matrix(d, m), weingarten_table(d, m)):
                failures.append(f"QW != I for d={d}, m={m}")
            checked.append((d, m))
    for n in range(1, 6):
        if len(centralizer_of_swap(n)) != 2**n * factorial(n):
            failures.append(f"centralizer order at n={n}")
        if max_cycle_bound(n) != n + 1:
            failures.append(f"cycle bound at n={n}")
    h = {n: w_plus_set(n)[1] for n in (2, 3, 4)}
    if h[2] != 2 or not (h[3] < 6 and h[4] < 24):
        failures.append(f"h values {h}")
    elapsed = time.time() - t0
    ok = not failures and elapsed < 300
    criterion(1, ok, f"QW=I exact on {len(checked)} (d, m) pairs, singular Gram for {degenerate}; "
                     f"h={h}; {elapsed:.0f}s {failures}")
    assert ok


# 2. brick-weight asymptotics ----------------------------------------------------------


def test_criterion_2_brick_weight_asymptotics(criterion):
    t0 = time.time()
    qs = (2, 4, 8, 16, 32)
    failures, worst = [], {}
    for n in (1, 2):
        group = symmetric_group(2 * n)
        cent = set(centralizer_of_swap(n))
        limit = np.array([[1 if (i == j and g in cent) else 0 for j in range(len(group))]
                          for i, g in enumerate(group)], dtype=object)
        devs = []
        for q in qs:
            scaled = brick_weight_table(q, n, exact=True) * q ** (4 * n)
            devs.append(np.vectorize(lambda f: abs(float(f)))(scaled - limit))
        devs = np.array(devs)
        per_pair_decreasing = np.all(np.diff(devs, axis=0) <= 0)
        max_dev = devs.reshape(len(qs), -1).max(axis=1)
        worst[n] = [f"{v:.3g}" for v in max_dev]
        if not per_pair_decreasing or not np.all(np.diff(max_dev) < 0):
            failures.append(f"not decreasing for n={n}")
        if max_dev[-1] >= 0.1:
            failures.append(f"deviation {max_dev[-1]:.3g} at q=32, n={n}")
    elapsed = time.time() - t0
    ok = not failures and elapsed < 1800
    criterion(2, ok, f"max deviation by q={qs}: {worst}; {elapsed:.0f}s {failures}")
    assert ok


# 3. entropy identities ---------------------------------------------------------------------


def test_criterion_3_ie_identities(criterion):
    t0 = time.time()
    ie = pur = 0.0
    pos = np.inf
    for r in range(100):
        L, T = (2, 1 + (r // 2) % 4) if r % 2 == 0 else (3, 1)
        spec = CircuitSpec(L=L, T=T, p=0.5, master_seed=1000 + r, initial_system="mixed_via_reference")
        rep = check_ie_entropies(run_circuit_dense(spec), n_list=(1, 2, 3))
        ie, pur = max(ie, rep.ie_deviation), max(pur, rep.purity_deviation)
        pos = min(pos, rep.min_conditional_entropy)
    broken = 0
    for r in range(100):
        L, T = (2, 1 + (r // 2) % 2) if r % 2 == 0 else (3, 1)
        spec = CircuitSpec(L=L, T=T, p=1.0, master_seed=2000 + r, probe="transduction",
                           initial_system="mixed_via_reference")
        broken += check_ie_entropies(run_circuit_dense(spec), n_list=(1, 2, 3)).ie_deviation > 0.1
    elapsed = time.time() - t0
    ok = ie < 1e-9 and pur < 1e-9 and pos > -1e-9 and broken >= 90 and elapsed < 600
    criterion(3, ok, f"noisy transduction: IE {ie:.1e}, purification {pur:.1e}, min S(P|A) {pos:.1e}; "
                     f"transduction broken in {broken}/100; {elapsed:.0f}s")
    assert ok


# 4. replica generators -------------------------------------------------------------------------


def measurement_site_state(seed):
    st = bell_pairs(2, [(("S", 0, 0), ("R", 0, 0)), (("S", 0, 1), ("R", 0, 1))])
    for t in range(2):
        st = st.apply_2q(("S", 0, 0), ("S", 0, 1), haar_unitary(4, seed * 10 + t))
        st = apply_probe(st, "projective_measurement", 0, layer=t)
    return st


def noisy_site_state(seed):
    st = bell_pairs(2, [(("S", 0, 0), ("R", 0, 0)), (("S", 0, 1), ("R", 0, 1))])
    for t in range(2):
        u = haar_unitary(2, seed * 7 + t)
        th = 0.3 + seed * 7 + t
        gate = (np.cos(th) * np.eye(4) + 1j * np.sin(th) * SWAP) @ np.kron(u, u)
        st = st.apply_2q(("S", 0, 0), ("S", 0, 1), gate)
        st = apply_probe(st, "noisy_transduction", 0, layer=t)
    return st


def single_transduction_state():
    st = DenseState().add_bell(("S", 0, 0), ("R", 0, 0)).add_bell(("A", 0, 0, 0), ("Ac", 0, 0, 0))
    return st.swap(("S", 0, 0), ("A", 0, 0, 0))


def relabelling_shift(n, d):
    """``X_{+1}`` in the factor-relabelling convention (``|x_i>`` moved to slot ``i+1``)."""
    return replica_perm_matrix(shift(n, 1), d).T


def test_criterion_4_replica_generators(criterion):
    t0 = time.time()
    meas = 0.0
    for n in (2, 3):
        tensors = [conditional_replica_tensor(measurement_site_state(s), n) for s in (1, 2)]
        tensors += [replica_tensor_from_spec(CircuitSpec(L=2, T=2, p=0.6, master_seed=s,
                                                         probe="projective_measurement"), n) for s in (2, 3)]
        for rt in tensors:
            res = check_replica_generators(rt)
            meas = max(meas, res["S"], res["H"], res["E"])
    noisy = []
    for rt in [conditional_replica_tensor(noisy_site_state(s), 2) for s in (0, 1)] + \
              [replica_tensor_from_spec(CircuitSpec(L=2, T=3, p=0.4, master_seed=s), 2) for s in (2, 3)]:
        noisy.append(check_replica_generators(rt, species_swap=True)["E_lu_both"])
    shift_res = []
    for n in (2, 3):
        rt = conditional_replica_tensor(single_transduction_state(), n)
        x = relabelling_shift(n, rt.dim)
        c = np.vdot(x, rt.matrix) / x.shape[0]
        shift_res.append(float(np.linalg.norm(rt.matrix - c * x) / np.linalg.norm(rt.matrix)))
    elapsed = time.time() - t0
    ok = meas < 1e-9 and max(noisy) < 1e-9 and max(shift_res) < 1e-9 and elapsed < 600
    criterion(4, ok, f"measurement S/H/E max {meas:.1e}; noisy transduction E (V on both sides) max "
                     f"{max(noisy):.1e}; single transduction vs X+1 residual {max(shift_res):.1e}; {elapsed:.0f}s")
    assert ok


# 5. stabilizer vs dense -----------------------------------------------------------------------------


def random_clifford_case(rng):
    n = int(rng.integers(2, 21))
    tab, st = Tableau(max(n, 1)), DenseState()
    for q in range(n):
        tab.add_zero()
        st = st.add_zero(q)
    for _ in range(int(rng.integers(1, 3 * n + 1))):
        a, b = (int(v) for v in rng.choice(n, 2, replace=False))
        cid = int(rng.integers(11520))
        tab.apply(a, b, cid)
        st = st.apply_2q(a, b, clifford_unitary(cid))
    worst = 0.0
    for _ in range(3):
        k = int(rng.integers(1, n + 1))
        region = sorted(int(v) for v in rng.choice(n, k, replace=False))
        worst = max(worst, abs(tab.entropy(region) - entropy(st, region)))
    return worst


def experiment_case(i):
    if i % 2:
        spec = CircuitSpec(L=2, T=1 + i % 3, p=0.5, master_seed=i, initial_system="mixed_via_reference")
    else:
        spec = CircuitSpec(L=4, T=1, p=0.5, master_seed=i)
    a = run_trajectory(spec).samples
    b = run_trajectory_dense(spec)[1].samples
    assert [s.observable for s in a] == [s.observable for s in b]
    return max(abs(x.value - y.value) for x, y in zip(a, b))


def test_criterion_5_cross_simulator(criterion):
    t0 = time.time()
    rng = np.random.default_rng(5)
    worst_random = max(random_clifford_case(rng) for _ in range(900))
    worst_exp = max(experiment_case(i) for i in range(100))
    elapsed = time.time() - t0
    ok = worst_random < 1e-9 and worst_exp < 1e-9 and elapsed < 900
    criterion(5, ok, f"900 random circuits max |dS| {worst_random:.1e}; 100 probed experiments max "
                     f"{worst_exp:.1e}; {elapsed:.0f}s")
    assert ok


# 6. cluster-model anchors ------------------------------------------------------------------------------


def test_criterion_6_self_dual_points(criterion):
    t0 = time.time()
    results = {}
    for h in (1, 2):
        exact = self_dual_point(h)
        grid = np.round(np.linspace(exact - 0.04, exact + 0.04, 9), 6)
        res = locate_critical(h, (16, 32, 64), grid, sweeps=10000, thermalization=500, n_blocks=50,
                              n_boot=200, seed=h)
        results[h] = (res.estimate, res.error, exact)
    elapsed = time.time() - t0
    ok = all(abs(est - exact) <= 0.010 for est, _, exact in results.values()) and elapsed < 7200
    detail = "; ".join(f"h={h}: {est:.4f} +- {err:.4f} (exact {exact:.4f})" for h, (est, err, exact) in results.items())
    criterion(6, ok, f"{detail}; {elapsed:.0f}s")
    assert ok


# 7. phenomenology ------------------------------------------------------------------------------------------

GRID = [round(0.2 + 0.025 * i, 3) for i in range(17)]  # 0.2 .. 0.6
LOW_P, HIGH_P = 0.02, 0.9
SIZES = (8, 16, 32)


def _final(df, observable, p):
    d = df[(df["observable"] == observable) & (df["layer"] == df["T"]) & np.isclose(df["p_or_nu"], p)]
    return {int(L): g["value"].to_numpy() for L, g in d.groupby("L")}


def test_criterion_7_phenomenology(criterion, tmp_path_factory):
    t0 = time.time()
    root = tmp_path_factory.mktemp("phenomenology")
    data = {}
    for obs, init in (("O", "pure_zero"), ("C", "mixed_via_reference")):
        cfg = validate({"engine": "stab", "sizes": list(SIZES), "time_factor": 2, "params": GRID + [LOW_P, HIGH_P],
                        "realizations": 200, "master_seed": 1, "observables": [obs], "output": obs,
                        "circuit": {"initial_system": init, "stride": 8}})
        data[obs] = load_dataset(run_sweep(cfg, output_root=root))
    reps = {}
    for obs, df in data.items():
        sub = df[df["p_or_nu"].isin(GRID)]
        reps[obs] = crossing_analysis(sub, obs, n_boot=1000, seed=7)
    o, c = reps["O"], reps["C"]
    # (a) common crossing of the order parameter
    a_ok = o.in_range and len(o.pairwise) == 3 and o.spread < 0.03
    # (b) volume phase at weak probing: O >= 0.8 of its maximum 2 * (2 |E_S| qubits)
    low = _final(data["O"], "O", LOW_P)
    o_max = {L: 2 * 2 * max(1, L // 8) for L in SIZES}
    b_ok = all(low[L].mean() >= 0.8 * o_max[L] for L in SIZES)
    # (c) IE-symmetric phase at strong probing
    high_o = _final(data["O"], "O", HIGH_P)
    high_c = _final(data["C"], "C", HIGH_P)
    c_ok = all(high_o[L].mean() <= 0.5 for L in SIZES) and all(np.all(high_c[L] == 0) for L in SIZES)
    # (d) both observables see the same transition
    if o.in_range and c.in_range:
        gap = abs(o.p_c - c.p_c)
        combined = math.hypot(o.p_c_err, c.p_c_err)
        d_ok = gap <= 2 * combined
        d_txt = f"|pO - pC| = {gap:.3f} vs 2 sigma {2 * combined:.3f}"
    else:
        d_ok, d_txt = False, "a crossing is out of range"
    elapsed = time.time() - t0
    ok = a_ok and b_ok and c_ok and d_ok and elapsed < 4 * 3600

    def fmt(rep):
        if not rep.in_range:
            return "out of range"
        pairs = ", ".join(f"{a}/{b}: {v:.3f}" for (a, b), v in sorted(rep.pairwise.items()))
        return f"{rep.p_c:.3f} +- {rep.p_c_err:.3f} (spread {rep.spread:.3f}; {pairs})"

    detail = (f"(a) {'ok' if a_ok else 'fail'} O crossing {fmt(o)}; "
              f"(b) {'ok' if b_ok else 'fail'} O(p={LOW_P}) {[round(float(low[L].mean()), 2) for L in SIZES]} "
              f"vs 0.8 max {[0.8 * o_max[L] for L in SIZES]}; "
              f"(c) {'ok' if c_ok else 'fail'} O(p={HIGH_P}) {[round(float(high_o[L].mean()), 2) for L in SIZES]}, "
              f"final C max {[float(high_c[L].max()) for L in SIZES]}; "
              f"(d) {'ok' if d_ok else 'fail'} C crossing {fmt(c)}, {d_txt}; {elapsed:.0f}s")
    criterion(7, ok, detail)
    assert ok


# 8. determinism ------------------------------------------------------------------------------------------------


def tree_bytes(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_criterion_8_pipeline_determinism(criterion, tmp_path):
    configs = {
        "stab": {"engine": "stab", "sizes": [4, 8], "params": [0.1, 0.4], "realizations": 3, "master_seed": 2},
        "dense": {"engine": "dense", "sizes": [2], "times": [2], "params": [0.5], "realizations": 3,
                  "circuit": {"initial_system": "mixed_via_reference"}},
        "potts": {"engine": "potts", "sizes": [4, 8], "params": [0.4, 0.6], "realizations": 2,
                  "potts": {"h": 2, "sweeps": 200, "thermalization": 20}},
    }
    reruns_ok = True
    for name, raw in configs.items():
        raw = dict(raw, output=name)
        a = run_sweep(validate(raw), output_root=tmp_path / "first")
        b = run_sweep(validate(raw), output_root=tmp_path / "second")
        reruns_ok &= tree_bytes(a) == tree_bytes(b)
    raw = dict(configs["stab"], output="stab")
    one = run_sweep(validate(raw), output_root=tmp_path / "w1", workers=1)
    two = run_sweep(validate(raw), output_root=tmp_path / "w2", workers=2)
    workers_ok = tree_bytes(one) == tree_bytes(two)
    ok = reruns_ok and workers_ok
    criterion(8, ok, f"re-runs byte-identical for {sorted(configs)}: {reruns_ok}; "
                     f"workers 1 vs 2 byte-identical: {workers_ok}")
    assert ok
