"""Acceptance suite: one PASS/FAIL line per criterion, printed even under capture."""

import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from qldc import bounds, cdec, codes, pir, qdec, rac
from qldc.cdec import Plan, TwoQueryDecoder

H = Fraction(1, 2)


@pytest.fixture
def verdict(capsys):
    def emit(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
        assert ok, f"{label}: {detail}"

    return emit


def test_gadget_exactness(verdict):
    dist_ok = all(
        sorted(qdec.gadget_outcome_distribution(*a)) == sorted([Fraction(3, 4)] + [Fraction(1, 12)] * 3)
        for a in product((0, 1), repeat=2)
    )
    probs = {run_f_a[1] for run_f_a in (
        (f, qdec.run_gadget(f, a)[f[2 * a[0] + a[1]]]) for f in product((0, 1), repeat=4) for a in product((0, 1), repeat=2)
    )}
    verdict("gadget exactness: 16 f x 4 a recover f(a) w.p. 11/14", dist_ok and probs == {Fraction(11, 14)}, f"values {sorted(map(str, probs))}")


def test_xor_gadget(verdict):
    probs = {qdec.xor_gadget_distribution(a1, a2)[a1 ^ a2] for a1, a2 in product((0, 1), repeat=2)}
    verdict("XOR gadget: a1 xor a2 recovered with certainty", probs == {Fraction(1)})


def test_hadamard_ldc(verdict):
    n, flips = 8, 25
    code = codes.hadamard_code(n)
    dec = cdec.hadamard_two_query_decoder(n)
    delta = Fraction(flips, code.m)
    rng = np.random.default_rng(2024)
    worst = Fraction(1)
    for _ in range(100):
        spec = codes.CorruptionSpec(delta, seed=int(rng.integers(1 << 31)))
        for _ in range(4):
            x = tuple(int(b) for b in rng.integers(0, 2, n))
            y = codes.corrupt(code(x), spec)
            assert codes.hamming_distance(y, code(x)) == flips
            worst = min(worst, min(cdec.evaluate_two_query(dec, y, x, i) for i in range(n)))
    verdict("Hadamard 2-query LDC at n=8, 25 flips: success >= 1 - 2 delta", worst >= 1 - 2 * delta, f"worst {worst} vs {1 - 2 * delta}")


def test_compiler_identity(verdict):
    rng = np.random.default_rng(7)
    gap = Fraction(0)
    for n in (3, 4):
        code = codes.hadamard_code(n)
        dec = cdec.hadamard_two_query_decoder(n)
        qd = qdec.compile_2ldc_to_1lqdc(dec)
        for delta in (Fraction(0), Fraction(1, 16), Fraction(1, 8)):
            for _ in range(20):
                spec = codes.CorruptionSpec(delta, seed=int(rng.integers(1 << 31)))
                for x in codes.all_messages(n):
                    y = codes.corrupt(code(x), spec)
                    for i in range(n):
                        c = cdec.evaluate_two_query(dec, y, x, i)
                        gap = max(gap, abs(qdec.evaluate_lqdc(qd, y, x, i) - (Fraction(3, 14) + Fraction(4, 7) * c)))
    verdict("compiler identity: quantum = 3/14 + (4/7) classical, exact", gap == 0, f"max gap {gap}")


def test_rac_recovery(verdict):
    delta = Fraction(1, 8)
    ok, notes = True, []
    for n in (3, 4):
        code = codes.hadamard_code(n)
        qd = qdec.compile_xor_ldc_to_lqdc(cdec.hadamard_two_query_decoder(n))
        eps = cdec.certify_epsilon(code, lambda y, x, i: qdec.evaluate_lqdc(qd, y, x, i), delta)
        ok &= eps > 0
        for mode, factor in ((rac.STANDARD, Fraction(1, 2)), (rac.IMPROVED, Fraction(3, 4))):
            for i in range(n):
                res = rac.rac_recover_bit(code, qd, i, delta, mode, eps)
                ok &= all(v >= res.bound - 1e-12 for v in res.success.values())
                expect = float(factor * delta * res.split.a_sq)
                ok &= max(abs(v - expect) for v in res.extraction_probability.values()) <= 1e-12
            notes.append(f"n={n} eps={eps} {mode} worst {res.worst:.6f} >= {res.bound:.6f}")
    verdict("random access code recovery at delta=1/8, both modes", ok, "; ".join(notes))


def test_nayak_ledger(verdict):
    n = 4
    code = codes.hadamard_code(n)
    qd = qdec.compile_xor_ldc_to_lqdc(cdec.hadamard_two_query_decoder(n))
    enc = [rac.build_uniform_state(code, x).state for x in codes.all_messages(n)]
    p = [rac.rac_recover_bit(code, qd, i, Fraction(1, 8), rac.IMPROVED).worst for i in range(n)]
    led = rac.nayak_audit(enc, p)
    final = (1 - bounds.binary_entropy(min(p))) * n <= led.qubits
    verdict("entropy ledger on |U(x)> at n=4 (5 qubits)", led.ok and final and led.qubits == 5,
            f"{len(led.inequalities)} inequalities, violations {[v.name for v in led.violations()]}")


def test_pir_xor2(verdict):
    ok, notes = True, []
    for n in (4, 8):
        s = pir.xor2_scheme(n)
        xs = list(codes.all_messages(n))
        ok &= all(pir.evaluate_pir(s, x, i) == 1 for x in xs for i in range(n))
        ok &= pir.classical_privacy_audit(s).distance == 0
        for path, target in ((pir.GENERIC, Fraction(11, 14)), (pir.XOR, Fraction(1))):
            q = pir.reduce_2server_to_1quantum(s, path)
            ok &= all(pir.evaluate_quantum_pir(q, x, i) == target for x in xs for i in range(n))
            dist = pir.quantum_privacy_audit(q).distance
            ok &= dist <= 1e-10
            notes.append(f"n={n} {path}: trace distance {dist:.1e}")
    verdict("xor2 PIR and its one-server quantum reduction", ok, "; ".join(notes))


def test_pir_2k_to_k(verdict):
    ok, notes = True, []
    rng = np.random.default_rng(3)
    for n, d in ((4, 2), (8, 3)):
        start = time.time()
        q = pir.reduce_2k_to_k_quantum(pir.cube_scheme(n, d))
        ok &= q.servers == 2 ** (d - 1)
        xs = list(codes.all_messages(n)) if n <= 4 else [tuple(int(b) for b in rng.integers(0, 2, n)) for _ in range(16)]
        ok &= all(pir.evaluate_quantum_pir(q, x, i) == 1 for x in xs for i in range(n))
        rep = pir.quantum_privacy_audit(q)
        ok &= max(rep.per_server) <= 1e-10
        notes.append(f"d={d}: {q.servers} servers, privacy {max(rep.per_server):.1e}, {time.time() - start:.1f}s")
    verdict("2k-server to k-quantum-server reduction on cube schemes", ok, "; ".join(notes))


def test_pir_to_rac(verdict):
    n = 3
    s = pir.xor2_scheme(n)
    ok, notes = True, []
    for path in (pir.GENERIC, pir.XOR):
        res = pir.pir_to_rac(s, path)
        p = min(res.recovery.values())
        ok &= res.max_recovery_gap <= 1e-10 and res.ledger.ok
        ok &= res.qubits >= (1 - bounds.binary_entropy(p)) * n
        notes.append(f"{path}: gap {res.max_recovery_gap:.1e}, p={p:.6f}")
    rep = bounds.check_instance("pir2_xor", {"n": n, "t": s.t, "eps": s.eps})
    ok &= rep.verdict == "pass" and abs(rep.slack - 1) < 1e-12
    verdict("PIR to random access code, and t >= n - 1 with slack 1", ok, "; ".join(notes) + f"; slack {rep.slack}")


def test_trevisan_binarization(verdict):
    n, ell = 4, 2
    code = codes.symbol_hadamard_code(n, ell)
    w = n // ell
    m = 1 << w
    plans = {}
    for i in range(n):
        blk, u = divmod(i, w)
        shift = ell - 1 - blk
        f = tuple(((a >> shift) ^ (b >> shift)) & 1 for a in range(1 << ell) for b in range(1 << ell))
        ps = []
        for j in range(m):
            k = j ^ (1 << (w - 1 - u))
            g = tuple(v ^ (z % 3 == 0) for z, v in enumerate(f)) if j % 2 else f
            ps.append(Plan(Fraction(1, m), j, k, g))
        plans[i] = tuple(ps)
    dec = TwoQueryDecoder(n, m, plans, ell=ell)
    eps = min(cdec.average_success(dec, code, i) for i in range(n)) - H
    res = cdec.trevisan_binarize(dec, code, c=2, eps=eps)
    target = H + eps / 2 ** (2 * ell)
    ok = all(v >= target for v in res.average_success.values())
    ok &= all(abs(s.correlation) >= 2 * s.eta / 2 ** (2 * ell) for sels in res.selections.values() for s in sels)
    verdict("Fourier binarization at n=4, l=2", ok and eps > 0,
            f"eps {eps}, worst {min(res.average_success.values())} >= {target}")


def test_kt_smoothing(verdict):
    code = codes.repetition_code(1, 8)
    delta = H
    dec = TwoQueryDecoder(1, 8, {0: tuple(Plan(Fraction(1, 8), 0, k, cdec.SECOND) for k in range(8))})
    eps = cdec.certify_epsilon(code, lambda y, x, i: cdec.evaluate_two_query(dec, y, x, i), delta)
    smooth = cdec.kt_smooth(dec, delta)
    c = cdec.audit_smoothness(smooth).c
    clean = min(cdec.evaluate_two_query(smooth, code(x), x, 0) for x in codes.all_messages(1))
    verdict("smoothing a point-mass decoder at delta=1/2, m=8", c <= 2 / delta and clean >= H + eps,
            f"c = {c}, clean success {clean} >= {H + eps}")


def test_fabricated_ldc_claim_rejected(verdict):
    rep = bounds.check_instance("ldc2", {"n": 20, "m": 2**10, "delta": Fraction(1, 4), "eps": H})
    verdict("negative control: n=20, m=2^10 claim fails the 2-query bound", rep.verdict == "fail",
            f"bound {rep.bound:.4f}, verdict {rep.verdict}")


def test_leaky_pir_detected(verdict):
    rep = pir.classical_privacy_audit(pir.leaky_scheme(4))
    verdict("negative control: leaking PIR has privacy distance 1", rep.distance == 1, f"distance {rep.distance}")
