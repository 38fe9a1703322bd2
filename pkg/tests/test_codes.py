import pytest
from hypothesis import given
from hypothesis import strategies as st

from qldc.codes import (
    CorruptionSpec,
    all_messages,
    codeword_from_json,
    codeword_to_json,
    corrupt,
    corruption_from_json,
    corruption_to_json,
    hadamard_code,
    hadamard_encode,
    hamming_distance,
    int_to_bits,
    repetition_code,
    symbol_binarize,
    symbol_hadamard_code,
)


def dot_parity(j_bits, x):
    return sum(a * b for a, b in zip(j_bits, x)) % 2


def test_hadamard_small():
    assert hadamard_encode((1,)) == (0, 1)
    assert hadamard_encode((1, 1)) == (0, 1, 1, 0)
    assert hadamard_encode((0, 0)) == (0, 0, 0, 0)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=8))
def test_hadamard_matches_dot_products(x):
    n = len(x)
    word = hadamard_encode(x)
    assert len(word) == 1 << n
    for j in range(0, 1 << n, max(1, (1 << n) // 16)):
        assert word[j] == dot_parity(int_to_bits(j, n), x)


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.integers(0, 1)] * (2 * n))))
def test_hadamard_linearity(bits):
    n = len(bits) // 2
    x, xp = bits[:n], bits[n:]
    s = tuple(a ^ b for a, b in zip(x, xp))
    assert hadamard_encode(s) == tuple(a ^ b for a, b in zip(hadamard_encode(x), hadamard_encode(xp)))


def test_corrupt_examples():
    w = (0, 1, 1, 0)
    assert corrupt(w, CorruptionSpec(0.0)) == w
    # positions are 0-based: flipping position 0 of 0110 gives 1110
    y = corrupt(w, CorruptionSpec(0.25, positions={0}))
    assert y == (1, 1, 1, 0) and hamming_distance(w, y) == 1


def test_seeded_pattern_size():
    code = hadamard_code(8)
    w = code((1, 0, 1, 1, 0, 0, 1, 0))
    y = corrupt(w, CorruptionSpec(0.1, seed=3))
    assert hamming_distance(w, y) == 25


def test_pattern_over_budget():
    with pytest.raises(ValueError):
        corrupt((0, 0, 0, 0), CorruptionSpec(0.25, positions={0, 1}))


@given(st.integers(0, 2**31), st.sampled_from([0.0, 0.05, 0.1, 0.25, 0.5]))
def test_corruption_distance_equals_pattern(seed, delta):
    w = hadamard_code(5)((1, 0, 1, 1, 0))
    spec = CorruptionSpec(delta, seed=seed)
    y = corrupt(w, spec)
    assert hamming_distance(w, y) == len(spec.pattern(len(w))) <= int(delta * len(w))


def test_binarize():
    code1 = symbol_hadamard_code(2, 1)
    bin1 = symbol_binarize(code1)
    for x in all_messages(2):
        word = code1(x)
        assert bin1(x) == tuple(b for s in word for b in (0, s))
    code2 = symbol_hadamard_code(2, 2)  # m = 2, symbols (x_1 j, x_2 j)
    assert code2((1, 1)) == (0, 3)
    assert symbol_binarize(code2)((1, 1))[4:] == hadamard_encode((1, 1))


def test_binarize_length_and_locality():
    code = symbol_hadamard_code(4, 2)
    binary = symbol_binarize(code)
    assert binary.m == code.m * 4
    for x in all_messages(4):
        word, bw = code(x), binary(x)
        for j in range(code.m):
            assert bw[4 * j : 4 * j + 4] == hadamard_encode(int_to_bits(word[j], 2))


def test_repetition():
    assert repetition_code(1, 8)((1,)) == (1,) * 8


def test_json_round_trips():
    w = hadamard_code(3)((1, 0, 1))
    assert codeword_from_json(codeword_to_json(w, 3)) == w
    sym = symbol_hadamard_code(4, 2)((1, 0, 0, 1))
    assert codeword_from_json(codeword_to_json(sym, 4, ell=2)) == sym
    for spec in (CorruptionSpec(0.25, positions={1, 2}), CorruptionSpec(0.1, seed=9)):
        back = corruption_from_json(corruption_to_json(spec))
        assert back.pattern(64) == spec.pattern(64)
