"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured numbers
before asserting. Run ``python3 tests/test_acceptance.py`` for the lines
alone, or ``pytest tests/test_acceptance.py -s``.
"""

import io
import json
import math
import time

import numpy as np
import pytest

from conftest import brute_force_ghz_block
from gapbound.bounds import (check_membership, correlation_bound, degeneracy_bound_exact, n_span_product,
                             trace_inequality_bounds, trial_bound, unification_bound)
from gapbound.cli import main
from gapbound.extremal import max_entropy_state
from gapbound.hamiltonian import (assemble, diagonalize, named_model, overlap_with_ground,
                                  sample_random_respecting)
from gapbound.operators import trace_norm
from gapbound.qecc import five_qubit_code, kl_check, qecc_bound, singletons, subspace_agreement_check
from gapbound.qstate import (DensityMatrix, PureState, bell, correlated_decomposition, dephased_correlated_state,
                             embed_pair, ghz, joint_measurement_distribution, schmidt_decompose)
from gapbound.topology import derive_from_error_set, k_local_topology, line_topology

LINE3 = line_topology((2, 2, 2))
BELL13 = embed_pair(bell(), (0, 2), (2, 2, 2))


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(line)
    return ok


def criterion_1():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    violations = 0
    for _ in range(10_000):
        d = int(rng.integers(2, 17))
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        a, b = (a + a.conj().T) / 2, (b + b.conj().T) / 2
        lower, upper, tr = trace_inequality_bounds(a, b)
        tol = 1e-9 * np.linalg.norm(a, 2) * np.linalg.norm(b, 2)
        violations += not (lower - tol <= tr <= upper + tol)
    elapsed = time.perf_counter() - start
    return report(1, violations == 0 and elapsed < 30,
                  f"trace inequality on 10000 pairs: {violations} violations, {elapsed:.1f}s (< 30s)")


def criterion_2():
    start = time.perf_counter()
    rho = dephased_correlated_state(correlated_decomposition(BELL13, [0], [2]))
    certified = check_membership(rho, BELL13, LINE3).passed
    eigs = rho.eigenvalues()
    violations, worst = 0, math.inf
    for seed in range(1000):
        s = diagonalize(assemble(sample_random_respecting(LINE3, seed)))
        F = overlap_with_ground(BELL13, s).fidelity
        rep = unification_bound(s, eigs, F)
        slack = 2 * (1 - F * F) - s.gap / s.e_tot
        worst = min(worst, slack)
        violations += (slack < -1e-9) or not rep.satisfied
    elapsed = time.perf_counter() - start
    return report(2, certified and violations == 0 and elapsed < 10,
                  f"toy sweep, 1000 seeds, dephased member certified={certified}: {violations} violations, "
                  f"min slack {worst:.3g}, {elapsed:.1f}s (< 10s)")


def criterion_3():
    spec = named_model("zz_chain", 3)
    s = diagonalize(assemble(spec))
    # oracle: energies of the 8 computational basis states
    enum = sorted(-(1 - 2 * a) * (1 - 2 * b) - (1 - 2 * b) * (1 - 2 * c)
                  for a in (0, 1) for b in (0, 1) for c in (0, 1))
    deg = enum.count(enum[0])
    psi = ghz(3)
    F = overlap_with_ground(psi, s).fidelity
    topo = k_local_topology((2, 2, 2), 2)
    member = max_entropy_state(psi, topo).state
    bound = degeneracy_bound_exact(psi, topo, member)
    ok = (np.allclose(s.energies, enum, atol=1e-12) and s.e0 == pytest.approx(-2) and s.ground_degeneracy == 2
          and deg == 2 and s.e_tot == pytest.approx(4) and abs(F - 1) < 1e-12 and bound == 2 == s.ground_degeneracy)
    return report(3, ok, f"zz chain E0={s.e0:.12g} degeneracy={s.ground_degeneracy} (oracle {deg}) "
                         f"E_tot={s.e_tot:.12g}, GHZ F={F:.12g}, degeneracy bound={bound}")


def criterion_4():
    n_bell = n_span_product(schmidt_decompose(bell(), [0]))
    uneq = PureState.from_vector((2, 2), [math.sqrt(0.7), 0, 0, math.sqrt(0.3)])
    n_uneq = n_span_product(schmidt_decompose(uneq, [0]))
    res = max_entropy_state(BELL13, LINE3)
    mix = np.zeros((8, 8), dtype=complex)
    for sign in (1, -1):
        for flip in (0, 1):
            v = np.zeros(8, dtype=complex)
            v[np.ravel_multi_index((0, 0, flip), (2, 2, 2))] = 1
            v[np.ravel_multi_index((1, 0, 1 - flip), (2, 2, 2))] = sign
            mix += np.outer(v, v.conj()) / 8
    oracle = DensityMatrix((2, 2, 2), mix)
    oracle_ok = check_membership(oracle, BELL13, LINE3).passed and oracle.rank() == 4
    ok = n_bell == 4 and n_uneq == 2 and res.rank >= 4 and oracle_ok
    return report(4, ok, f"N_span Bell={n_bell}, (0.7,0.3)={n_uneq}; max-entropy rank={res.rank} (>= 4), "
                         f"rank-4 oracle member passes={oracle_ok}")


def criterion_5():
    start = time.perf_counter()
    violations = 0
    for seed in range(500):
        s = diagonalize(assemble(sample_random_respecting(LINE3, seed)))
        psi = PureState((2, 2, 2), s.vectors[:, 0])
        F = overlap_with_ground(psi, s).fidelity
        joint = joint_measurement_distribution(psi, [0], [2])
        rep = correlation_bound(s, joint, F)
        c = joint.correlation
        # the criterion's rhs is the F = 1 form C(1-C)E_tot
        violations += not rep.satisfied or rep.lhs > c * (1 - c) * s.e_tot + 1e-9 * s.e_tot
    elapsed = time.perf_counter() - start
    return report(5, violations == 0 and elapsed < 20,
                  f"correlation bound at F=1, 500 seeds: {violations} violations, {elapsed:.1f}s (< 20s)")


def criterion_6():
    phi = embed_pair(PureState.from_vector((2, 2), [1, 0, 0, -1]), (0, 2), (2, 2, 2))
    member = check_membership(phi, BELL13, LINE3).passed
    orth = abs(BELL13.overlap(phi))
    used = violations = 0
    for seed in range(500):
        s = diagonalize(assemble(sample_random_respecting(LINE3, seed)))
        F = overlap_with_ground(BELL13, s).fidelity
        if F < 0.5:
            continue
        used += 1
        rep = trial_bound(s, F, math.pi / 2)
        violations += not rep.satisfied
        violations += abs(rep.rhs - (1 - F * F) / (F * F) * s.e_tot) > 1e-9 * s.e_tot
    # near-unit overlap: H = U diag(E) U^dag with ground vector cos(a) psi + sin(a) psi_perp
    rng = np.random.default_rng(6)
    ratios = []
    for F in (0.999, 0.9993, 0.9996, 0.9999):
        perp = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        perp -= np.vdot(BELL13.amplitudes, perp) * BELL13.amplitudes
        perp /= np.linalg.norm(perp)
        g = F * BELL13.amplitudes + math.sqrt(1 - F * F) * perp
        rest = np.linalg.qr(np.column_stack([g, rng.standard_normal((8, 7))]))[0]
        rest[:, 0] = g
        energies = np.concatenate([[0.0], np.sort(rng.uniform(0.5, 2.0, 7))])
        s = diagonalize(rest @ np.diag(energies) @ rest.conj().T)
        F_meas = overlap_with_ground(BELL13, s).fidelity
        thm1 = unification_bound(s, [0.5, 0.5], F_meas).inputs["gap_bound"]
        ratios.append(thm1 / trial_bound(s, F_meas, math.pi / 2).rhs)
    ratio_ok = all(1.9 <= r <= 2.1 for r in ratios)
    ok = member and orth < 1e-12 and used > 0 and violations == 0 and ratio_ok
    return report(6, ok, f"trial bound (theta=pi/2, phi certified={member}, |<psi|phi>|={orth:.1e}): "
                         f"{violations} violations over {used} seeds with F >= 0.5; "
                         f"factor-2 ratios at F >= 0.999: {', '.join(f'{r:.4f}' for r in ratios)}")


def criterion_7():
    start = time.perf_counter()
    code = five_qubit_code()
    pair5 = k_local_topology((2,) * 5, 2)
    kl5 = kl_check(code, singletons(5), 1e-10).passed
    ag5 = subspace_agreement_check(code, pair5, 1e-10)
    v0, v1 = np.zeros(8), np.zeros(8)
    v0[0] = v1[7] = 1
    from gapbound.qecc import CodeSubspace
    ghz_code = CodeSubspace((2, 2, 2), np.column_stack([v0, v1]))
    kl3 = kl_check(ghz_code, singletons(3), 1e-10).passed
    ag3 = subspace_agreement_check(ghz_code, k_local_topology((2, 2, 2), 2), 1e-10).passed
    violations = 0
    for seed in range(200):
        s = diagonalize(assemble(sample_random_respecting(pair5, seed)))
        F = overlap_with_ground(code.state(0), s).fidelity
        rep = qecc_bound(s, code, F, ag5)
        violations += not rep.satisfied
    # equivalence on the test vectors
    rng = np.random.default_rng(7)
    cases = [(code, singletons(5)), (code, [(0, 1)]), (code, [(0, 1), (2, 3)]), (ghz_code, singletons(3)),
             (ghz_code, [(0,)])]
    for _ in range(3):
        noise = rng.standard_normal(code.basis.shape) + 1j * rng.standard_normal(code.basis.shape)
        cases.append((CodeSubspace.from_states(code.dims, (code.basis + 1e-3 * noise).T), singletons(5)))
    equiv = all(kl_check(c, e).passed == subspace_agreement_check(c, derive_from_error_set(e, c.dims)).passed
                for c, e in cases)
    elapsed = time.perf_counter() - start
    ok = kl5 and ag5.passed and not kl3 and not ag3 and violations == 0 and equiv and elapsed < 60
    return report(7, ok, f"[[5,1,3]] kl={kl5} agreement={ag5.passed}; span{{000,111}} kl={kl3} agreement={ag3}; "
                         f"{violations} violations over 200 seeds; equivalence on {len(cases)} vectors={equiv}; "
                         f"{elapsed:.1f}s (< 60s)")


def criterion_8():
    psi = ghz(3)
    topo = k_local_topology((2, 2, 2), 2)
    res = max_entropy_state(psi, topo)
    oracle = brute_force_ghz_block(psi)
    expected = np.zeros((8, 8))
    expected[0, 0] = expected[7, 7] = 0.5
    dist_oracle = 0.5 * trace_norm(res.state.matrix - oracle)
    dist_expected = 0.5 * trace_norm(res.state.matrix - expected)
    ok = dist_oracle <= 1e-5 and dist_expected <= 1e-5 and res.deviation <= 1e-6
    return report(8, ok, f"GHZ max-entropy member: trace distance {dist_oracle:.2e} to brute-force oracle, "
                         f"{dist_expected:.2e} to (|000><000|+|111><111|)/2, marginal deviation {res.deviation:.2e}")


def criterion_9(tmp_dir):
    import pathlib
    tmp = pathlib.Path(tmp_dir)
    (tmp / "line3.json").write_text(json.dumps(LINE3.to_dict()))
    (tmp / "pair5.json").write_text(json.dumps(k_local_topology((2,) * 5, 2).to_dict()))
    configs = [
        ["sweep", "--topology", str(tmp / "line3.json"), "--state", "bell:0,2", "--seeds", "0..199",
         "--rho", "dephased"],
        ["sweep", "--topology", str(tmp / "line3.json"), "--state", "bell:0,2", "--seeds", "0..49",
         "--bound", "unification,correlation", "--json"],
        ["sweep", "--topology", str(tmp / "pair5.json"), "--bound", "qecc", "--seeds", "0..19"],
    ]
    identical = True
    for cfg in configs:
        outputs = []
        for extra in ([], [], ["--jobs", "4"]):
            buf = io.StringIO()
            main(cfg + extra, stdout=buf, stderr=io.StringIO())
            outputs.append(buf.getvalue().encode())
        identical &= len(set(outputs)) == 1 and len(outputs[0]) > 0
    return report(9, identical, f"{len(configs)} sweep configs rerun (serial twice, 4 jobs once): "
                                f"byte-identical={identical}")


def test_criterion_1_trace_inequality(capsys):
    with capsys.disabled():
        assert criterion_1()


def test_criterion_2_toy_sweep(capsys):
    with capsys.disabled():
        assert criterion_2()


def test_criterion_3_exact_degeneracy(capsys):
    with capsys.disabled():
        assert criterion_3()


def test_criterion_4_n_span(capsys):
    with capsys.disabled():
        assert criterion_4()


def test_criterion_5_correlation(capsys):
    with capsys.disabled():
        assert criterion_5()


def test_criterion_6_trial_bound(capsys):
    with capsys.disabled():
        assert criterion_6()


def test_criterion_7_qecc(capsys):
    with capsys.disabled():
        assert criterion_7()


def test_criterion_8_max_entropy(capsys):
    with capsys.disabled():
        assert criterion_8()


def test_criterion_9_determinism(capsys, tmp_path):
    with capsys.disabled():
        assert criterion_9(tmp_path)


if __name__ == "__main__":
    import sys
    import tempfile
    sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
    with tempfile.TemporaryDirectory() as d:
        results = [f() for f in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                 criterion_6, criterion_7, criterion_8)] + [criterion_9(d)]
    sys.exit(0 if all(results) else 1)
