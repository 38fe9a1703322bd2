import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qldc.cdec import evaluate_two_query
from qldc.codes import all_messages
from qldc.pir import (
    GENERIC,
    XOR,
    PirScheme,
    classical_privacy_audit,
    constant_scheme,
    cube_scheme,
    evaluate_pir,
    evaluate_quantum_pir,
    leaky_scheme,
    pir_to_rac,
    pir_to_smooth,
    quantum_privacy_audit,
    reduce_2k_to_k_quantum,
    reduce_2server_to_1quantum,
    scheme_from_descriptor,
    server_density,
    simulate_quantum_pir,
    transcript_csv,
    xor2_scheme,
)


def test_xor2_reconstructs_every_r():
    s = xor2_scheme(4)
    x = (1, 0, 1, 0)
    i = 1
    for r in s.randomness:
        ans = s.answers(x, s.queries(i, r))
        assert s.reconstruct(i, r, ans) == x[i]
    assert evaluate_pir(s, x, i) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_xor2_correct_and_private(n):
    s = xor2_scheme(n)
    for x in all_messages(n):
        for i in range(n):
            assert evaluate_pir(s, x, i) == 1
    assert classical_privacy_audit(s).distance == 0


@pytest.mark.parametrize("n,d", [(4, 2), (9, 2), (8, 3)])
def test_cube_correct_and_private(n, d):
    s = cube_scheme(n, d)
    assert s.k == 2**d and s.t == d * round(n ** (1 / d))
    rng = np.random.default_rng(n + d)
    for _ in range(4):
        x = tuple(int(b) for b in rng.integers(0, 2, n))
        for i in range(n):
            assert evaluate_pir(s, x, i) == 1
    assert classical_privacy_audit(s).distance == 0


def test_cube_rejects_non_power():
    with pytest.raises(ValueError):
        cube_scheme(5, 2)
    with pytest.raises(ValueError):
        cube_scheme(4, 0)


def test_leaky_scheme_not_private():
    s = leaky_scheme(3)
    rep = classical_privacy_audit(s)
    assert rep.distance == 1
    assert rep.per_server == (1, 1)
    assert all(evaluate_pir(s, x, i) == 1 for x in all_messages(3) for i in range(3))


def test_constant_scheme_recovers_half_on_average():
    n = 3
    s = constant_scheme(n)
    avg = sum(evaluate_pir(s, x, i) for x in all_messages(n) for i in range(n)) / (n * 2**n)
    assert avg == Fraction(1, 2)
    assert classical_privacy_audit(s).distance == 0


def test_coin_reconstruction_gives_half():
    n = 2
    base = xor2_scheme(n)
    coin = PirScheme(2, n, n, 1, base.randomness, base.query_gen, base.answer, lambda i, r, a: Fraction(1, 2), True, Fraction(0))
    for x in all_messages(n):
        assert evaluate_pir(coin, x, 0) == Fraction(1, 2)
    with pytest.raises(ValueError):
        evaluate_quantum_pir(reduce_2server_to_1quantum(coin), (0, 0), 0)


def test_quantum_generic_identity():
    # correct classical scheme: 3/14 + 4/7 = 11/14 exactly
    for n in (2, 3):
        q = reduce_2server_to_1quantum(xor2_scheme(n), GENERIC)
        for x in all_messages(n):
            for i in range(n):
                assert evaluate_quantum_pir(q, x, i) == Fraction(11, 14)


def test_quantum_generic_identity_on_constant_scheme():
    n = 2
    s = constant_scheme(n)
    q = reduce_2server_to_1quantum(s, GENERIC)
    for x in all_messages(n):
        for i in range(n):
            c = evaluate_pir(s, x, i)
            assert evaluate_quantum_pir(q, x, i) == Fraction(3, 14) + Fraction(4, 7) * c


def test_quantum_xor_path_exact():
    n = 3
    q = reduce_2server_to_1quantum(xor2_scheme(n), XOR)
    assert all(evaluate_quantum_pir(q, x, i) == 1 for x in all_messages(n) for i in range(n))


@settings(max_examples=25)
@given(st.sampled_from([GENERIC, XOR]), st.sampled_from(["xor2", "leaky", "constant"]), st.data())
def test_simulation_matches_exact(path, family, data):
    n = 3
    s = {"xor2": xor2_scheme, "leaky": leaky_scheme, "constant": constant_scheme}[family](n)
    q = reduce_2server_to_1quantum(s, path)
    x = data.draw(st.tuples(*[st.integers(0, 1)] * n))
    i = data.draw(st.integers(0, n - 1))
    assert abs(simulate_quantum_pir(q, x, i) - float(evaluate_quantum_pir(q, x, i))) < 1e-12


def test_server_density_generic_closed_form():
    # dummy branch with weight 1/3, each real branch uniformly spread over 2^t queries
    n = 3
    q = reduce_2server_to_1quantum(xor2_scheme(n), GENERIC)
    T = 2**n
    expect = np.diag([1 / 3] + [0.0] * (T - 1) + [1 / (3 * T)] * (2 * T))
    for i in range(n):
        rho = server_density(q, 0, (1, 0, 1), i)
        assert np.allclose(rho, expect, atol=1e-12)


@pytest.mark.parametrize("path", [GENERIC, XOR])
def test_quantum_privacy(path):
    q = reduce_2server_to_1quantum(xor2_scheme(3), path)
    assert quantum_privacy_audit(q).distance < 1e-10


def test_leaky_quantum_not_private():
    q = reduce_2server_to_1quantum(leaky_scheme(3), XOR)
    assert abs(quantum_privacy_audit(q).distance - 1) < 1e-10


def test_2k_to_k_matches_xor_path_on_xor2():
    n = 3
    s = xor2_scheme(n)
    a = reduce_2k_to_k_quantum(s)
    b = reduce_2server_to_1quantum(s, XOR)
    assert a.servers == 1
    for x in all_messages(n):
        for i in range(n):
            assert evaluate_quantum_pir(a, x, i) == evaluate_quantum_pir(b, x, i)
            assert np.allclose(server_density(a, 0, x, i), server_density(b, 0, x, i))


def test_2k_to_k_on_cube():
    s = cube_scheme(4, 2)
    q = reduce_2k_to_k_quantum(s)
    assert q.servers == 2
    rng = np.random.default_rng(7)
    for _ in range(3):
        x = tuple(int(b) for b in rng.integers(0, 2, 4))
        for i in range(4):
            assert evaluate_quantum_pir(q, x, i) == 1
            assert abs(simulate_quantum_pir(q, x, i) - 1) < 1e-12
    assert quantum_privacy_audit(q, xs=[(0, 1, 1, 0), (1, 1, 1, 1)]).distance < 1e-10


def test_reduction_argument_checks():
    with pytest.raises(ValueError):
        reduce_2server_to_1quantum(cube_scheme(8, 3))
    with pytest.raises(ValueError):
        reduce_2server_to_1quantum(xor2_scheme(2), "teleport")
    s = xor2_scheme(2)
    non_xor = PirScheme(2, 2, 2, 1, s.randomness, s.query_gen, s.answer, s.reconstruct, False, Fraction(1, 2))
    with pytest.raises(ValueError):
        reduce_2server_to_1quantum(non_xor, XOR)
    with pytest.raises(ValueError):
        reduce_2k_to_k_quantum(non_xor)


@pytest.mark.parametrize("path,target", [(GENERIC, 11 / 14), (XOR, 1.0)])
def test_pir_to_rac(path, target):
    n = 3
    rac = pir_to_rac(xor2_scheme(n), path)
    assert rac.max_recovery_gap <= 1e-10
    assert rac.lam_spread <= 1e-10
    assert rac.ledger is not None and rac.ledger.ok
    assert rac.qubits == n + 2
    assert abs(min(rac.recovery.values()) - target) < 1e-12
    for x in all_messages(n):
        assert abs(np.linalg.norm(rac.state(x).amplitudes) - 1) < 1e-12


def test_pir_to_rac_rejects_leaky():
    with pytest.raises(ValueError):
        pir_to_rac(leaky_scheme(3), XOR)


def test_pir_to_smooth_xor2():
    n = 3
    s = xor2_scheme(n)
    code, dec, rep = pir_to_smooth(s)
    T = 2**s.t
    assert code.m == 2 * T == 16
    assert rep.c == 2
    assert code.m <= 6 * T
    for x in all_messages(n):
        y = code(x)
        for i in range(n):
            assert evaluate_two_query(dec, y, x, i) == 1


def test_pir_to_smooth_needs_two_servers():
    with pytest.raises(ValueError):
        pir_to_smooth(cube_scheme(8, 3))


def test_descriptor_roundtrip():
    for s in (xor2_scheme(4), cube_scheme(9, 2)):
        doc = json.loads(s.to_json())
        back = scheme_from_descriptor(doc)
        assert back.descriptor() == s.descriptor()
    with pytest.raises(ValueError):
        scheme_from_descriptor({"family": "xor2", "n": 4, "t": 3})
    with pytest.raises(ValueError):
        scheme_from_descriptor({"family": "mystery", "n": 4})


def test_transcript_csv():
    s = xor2_scheme(2)
    text = transcript_csv(s, (1, 0), 0)
    lines = text.strip().split("\n")
    assert lines[0] == "r,q0,q1,a0,a1,pr_output_1"
    assert len(lines) == 1 + 4
    for line in lines[1:]:
        r, q0, q1, a0, a1, p = line.split(",")
        assert int(q0, 16) ^ int(q1, 16) == 0b10
        assert p == "1"


def test_privacy_report_json():
    doc = json.loads(classical_privacy_audit(leaky_scheme(2)).to_json())
    assert doc["kind"] == "classical"
    assert doc["distance"] == "1"
