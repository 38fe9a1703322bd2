"""Codes over {0,1} and {0,1}^l, corruption patterns, and codeword I/O.

Conventions: words are tuples of ints (bits, or l-bit symbols stored as
ints), positions are 0-based.  A bit string ``x = x_1 ... x_n`` is mapped to
an integer with ``x_1`` as the most significant bit, so the Hadamard
position ``j`` and its bit string agree under ``int(j, 2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, Sequence

import numpy as np

__all__ = [
    "BinaryCode",
    "AlphabetCode",
    "CorruptionSpec",
    "bits_to_int",
    "int_to_bits",
    "all_messages",
    "unit_vector",
    "parity",
    "hadamard_encode",
    "hadamard_code",
    "symbol_hadamard_code",
    "repetition_code",
    "corrupt",
    "hamming_distance",
    "symbol_binarize",
    "codeword_to_json",
    "codeword_from_json",
    "corruption_to_json",
    "corruption_from_json",
]

Word = tuple


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | (int(b) & 1)
    return v


def int_to_bits(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


def all_messages(n: int) -> Iterator[tuple[int, ...]]:
    return (tuple(x) for x in product((0, 1), repeat=n))


def unit_vector(n: int, i: int) -> int:
    """Integer form of e_i (0-based i, most significant bit first)."""
    return 1 << (n - 1 - i)


def parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class BinaryCode:
    n: int
    m: int
    encode: Callable[[Sequence[int]], Word]
    name: str = "binary"

    @property
    def ell(self) -> int:
        return 1

    def __call__(self, x: Sequence[int]) -> Word:
        word = tuple(self.encode(tuple(x)))
        if len(word) != self.m:
            raise ValueError(f"encoder produced {len(word)} symbols, expected {self.m}")
        return word


@dataclass(frozen=True)
class AlphabetCode:
    """Code with symbols in {0,1}^ell, stored as ints in [0, 2^ell)."""

    n: int
    m: int
    ell: int
    encode: Callable[[Sequence[int]], Word]
    name: str = "alphabet"

    def __call__(self, x: Sequence[int]) -> Word:
        word = tuple(self.encode(tuple(x)))
        if len(word) != self.m:
            raise ValueError(f"encoder produced {len(word)} symbols, expected {self.m}")
        top = 1 << self.ell
        if any(not 0 <= s < top for s in word):
            raise ValueError("symbol outside the alphabet")
        return word


def hadamard_encode(x: Sequence[int]) -> Word:
    """C(x)_j = j . x mod 2 for j in {0,1}^n, j in lexicographic order."""
    n = len(x)
    if n < 1:
        raise ValueError("message length must be at least 1")
    xv = bits_to_int(x)
    return tuple(parity(j & xv) for j in range(1 << n))


def hadamard_code(n: int) -> BinaryCode:
    if n < 1:
        raise ValueError("message length must be at least 1")
    return BinaryCode(n, 1 << n, hadamard_encode, name=f"hadamard-{n}")


def symbol_hadamard_code(n: int, ell: int) -> AlphabetCode:
    """Hadamard code of ell interleaved blocks: symbol j = (j.u_1, ..., j.u_ell).

    The message x splits into ell consecutive blocks u_b of n/ell bits; the
    b-th bit (most significant first) of symbol j is the Hadamard bit of u_b.
    """
    if ell < 1 or n % ell:
        raise ValueError("ell must divide n")
    w = n // ell

    def enc(x):
        blocks = [bits_to_int(x[b * w : (b + 1) * w]) for b in range(ell)]
        return tuple(
            bits_to_int([parity(j & u) for u in blocks]) for j in range(1 << w)
        )

    return AlphabetCode(n, 1 << w, ell, enc, name=f"symbol-hadamard-{n}-{ell}")


def repetition_code(n: int, copies: int) -> BinaryCode:
    return BinaryCode(n, n * copies, lambda x: tuple(x) * copies, name=f"repetition-{n}x{copies}")


def hamming_distance(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise ValueError("length mismatch")
    return sum(1 for a, b in zip(u, v) if a != b)


@dataclass(frozen=True)
class CorruptionSpec:
    """Either an explicit set of positions, or a seed drawing floor(delta*m) of them."""

    delta: float
    positions: frozenset | None = None
    seed: int | None = None

    def __post_init__(self):
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.positions is not None:
            object.__setattr__(self, "positions", frozenset(int(p) for p in self.positions))
            if self.seed is not None:
                raise ValueError("give positions or a seed, not both")
        elif self.seed is None:
            object.__setattr__(self, "positions", frozenset())

    def budget(self, m: int) -> int:
        # exact floor for rational-looking deltas such as 0.1 * 256
        return math.floor(round(self.delta * m, 9))

    def pattern(self, m: int) -> frozenset:
        if self.positions is not None:
            return self.positions
        rng = np.random.default_rng(self.seed)
        return frozenset(int(p) for p in rng.choice(m, size=self.budget(m), replace=False))


def corrupt(word: Sequence[int], spec: CorruptionSpec, ell: int = 1) -> Word:
    """Flip every bit of each symbol in the pattern.

    Explicit patterns use the all-ones mask; seeded patterns draw a nonzero
    mask per position from the same generator stream.
    """
    m = len(word)
    pattern = spec.pattern(m)
    if len(pattern) > spec.budget(m):
        raise ValueError(f"pattern of size {len(pattern)} exceeds budget {spec.budget(m)}")
    if any(not 0 <= p < m for p in pattern):
        raise ValueError("pattern position out of range")
    full = (1 << ell) - 1
    masks = {p: full for p in pattern}
    if spec.seed is not None and ell > 1:
        rng = np.random.default_rng([spec.seed, 1])
        masks = {p: int(rng.integers(1, full + 1)) for p in sorted(pattern)}
    return tuple(s ^ masks[p] if p in masks else s for p, s in enumerate(word))


def symbol_binarize(code: AlphabetCode) -> BinaryCode:
    """Replace each l-bit symbol s by its 2^l-bit Hadamard code (bit S = S.s)."""
    if code.ell < 1:
        raise ValueError("symbol width must be at least 1")
    width = 1 << code.ell

    def enc(x):
        out = []
        for s in code(x):
            out.extend(parity(S & s) for S in range(width))
        return tuple(out)

    return BinaryCode(code.n, code.m * width, enc, name=f"{code.name}-binarized")


def binarized_position(j: int, S: int, ell: int) -> int:
    return j * (1 << ell) + S


def _word_to_hex(word: Sequence[int], ell: int) -> tuple[str, int]:
    bits = len(word) * ell
    v = 0
    for s in word:
        v = (v << ell) | s
    digits = max(1, -(-bits // 4))
    return format(v, f"0{digits}x"), bits


def codeword_to_json(word: Sequence[int], n: int, ell: int = 1) -> str:
    hx, bits = _word_to_hex(word, ell)
    return json.dumps({"n": n, "m": len(word), "ell": ell, "word": hx, "bits": bits}, separators=(",", ":"))


def codeword_from_json(text: str) -> Word:
    doc = json.loads(text)
    m, ell, bits = doc["m"], doc["ell"], doc["bits"]
    if bits != m * ell:
        raise ValueError("bit-length header disagrees with m * ell")
    v = int(doc["word"], 16)
    mask = (1 << ell) - 1
    return tuple((v >> (ell * (m - 1 - p))) & mask for p in range(m))


def corruption_to_json(spec: CorruptionSpec) -> str:
    doc = {"delta": spec.delta}
    if spec.seed is not None:
        doc["seed"] = spec.seed
    else:
        doc["positions"] = sorted(spec.positions)
    return json.dumps(doc, separators=(",", ":"))


def corruption_from_json(text: str) -> CorruptionSpec:
    doc = json.loads(text)
    if "seed" in doc:
        return CorruptionSpec(doc["delta"], seed=doc["seed"])
    return CorruptionSpec(doc["delta"], positions=frozenset(doc.get("positions", ())))
