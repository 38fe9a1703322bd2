"""Classical randomized decoders as explicit rational distributions over query plans.

A plan ``(weight, j, k, f)`` queries positions ``j`` and ``k`` of the word and
outputs ``f(y_j, y_k)``.  ``f`` is a truth table indexed by ``(a << ell) | b``.
A position of ``None`` means "not queried"; the plan then sees the fixed
symbol 0 there (this is how smoothing removes heavy indices).
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Mapping, Sequence

import numpy as np

from .codes import AlphabetCode, BinaryCode, all_messages, symbol_binarize, unit_vector

__all__ = [
    "XOR",
    "XNOR",
    "AND",
    "FIRST",
    "SECOND",
    "truth_table",
    "constant_table",
    "Plan",
    "TwoQueryDecoder",
    "AdaptivePlan",
    "AdaptiveTwoQueryDecoder",
    "XorPlan",
    "XorDecoder",
    "SmoothReport",
    "FourierSelection",
    "TrevisanResult",
    "hadamard_two_query_decoder",
    "hadamard_xor_chain_decoder",
    "evaluate_two_query",
    "evaluate_adaptive",
    "evaluate_xor_decoder",
    "average_success",
    "adaptive_to_nonadaptive",
    "audit_smoothness",
    "heavy_indices",
    "kt_smooth",
    "walsh_hadamard",
    "fourier_select",
    "trevisan_binarize",
    "all_patterns",
    "certify_epsilon",
    "decoder_to_json",
    "decoder_from_json",
    "as_fraction",
]

MAX_ENUM_N = 12
MAX_ELL = 3


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(str(value))


def truth_table(fn: Callable[[int, int], int], ell: int = 1) -> tuple[int, ...]:
    size = 1 << ell
    return tuple(int(fn(a, b)) & 1 for a in range(size) for b in range(size))


XOR = (0, 1, 1, 0)
XNOR = (1, 0, 0, 1)
AND = (0, 0, 0, 1)
FIRST = (0, 0, 1, 1)
SECOND = (0, 1, 0, 1)


def constant_table(value: int, ell: int = 1) -> tuple[int, ...]:
    return (value & 1,) * (1 << (2 * ell))


@dataclass(frozen=True)
class Plan:
    weight: Fraction
    j: int | None
    k: int | None
    f: tuple

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "f", tuple(int(v) for v in self.f))

    def output(self, y: Sequence[int], ell: int = 1) -> int:
        a = 0 if self.j is None else y[self.j]
        b = 0 if self.k is None else y[self.k]
        return self.f[(a << ell) | b]

    def queried(self) -> set:
        return {p for p in (self.j, self.k) if p is not None}


def _check_distribution(plans: Sequence, what: str) -> None:
    total = sum(p.weight for p in plans)
    if any(p.weight < 0 for p in plans):
        raise ValueError(f"{what}: negative plan weight")
    if total != 1:
        raise ValueError(f"{what}: plan weights sum to {total}, expected 1")


@dataclass(frozen=True)
class TwoQueryDecoder:
    """Non-adaptive decoder: for each target i, a distribution over plans."""

    n: int
    m: int
    plans: Mapping[int, tuple]
    ell: int = 1

    def __post_init__(self):
        plans = {int(i): tuple(ps) for i, ps in self.plans.items()}
        size = 1 << (2 * self.ell)
        for i, ps in plans.items():
            _check_distribution(ps, f"target {i}")
            for p in ps:
                if len(p.f) != size:
                    raise ValueError(f"truth table must have {size} entries")
                for pos in (p.j, p.k):
                    if pos is not None and not 0 <= pos < self.m:
                        raise ValueError(f"query position {pos} out of range")
        object.__setattr__(self, "plans", plans)

    def targets(self):
        return sorted(self.plans)

    def is_xor(self) -> bool:
        return self.ell == 1 and all(
            p.f == XOR and p.j is not None and p.k is not None
            for ps in self.plans.values()
            for p in ps
        )


@dataclass(frozen=True)
class AdaptivePlan:
    """Query ``q1``, then ``q2[a]`` where ``a`` is q1's answer; output ``out[(a << 1) | b]``."""

    weight: Fraction
    q1: int
    q2: tuple[int, int]
    out: tuple

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "q2", tuple(self.q2))
        object.__setattr__(self, "out", tuple(int(v) for v in self.out))
        if len(self.q2) != 2 or len(self.out) != 4:
            raise ValueError("branch map must be total over both answers of q1")


@dataclass(frozen=True)
class AdaptiveTwoQueryDecoder:
    n: int
    m: int
    plans: Mapping[int, tuple]

    def __post_init__(self):
        plans = {int(i): tuple(ps) for i, ps in self.plans.items()}
        for i, ps in plans.items():
            _check_distribution(ps, f"target {i}")
        object.__setattr__(self, "plans", plans)


@dataclass(frozen=True)
class XorPlan:
    """Query every position in ``positions`` and output their XOR (negated if asked)."""

    weight: Fraction
    positions: tuple
    negate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "positions", tuple(self.positions))


@dataclass(frozen=True)
class XorDecoder:
    n: int
    m: int
    plans: Mapping[int, tuple]

    def __post_init__(self):
        plans = {int(i): tuple(ps) for i, ps in self.plans.items()}
        sizes = {len(p.positions) for ps in plans.values() for p in ps}
        if len(sizes) > 1:
            raise ValueError("all plans must make the same number of queries")
        for i, ps in plans.items():
            _check_distribution(ps, f"target {i}")
        object.__setattr__(self, "plans", plans)

    @property
    def queries(self) -> int:
        for ps in self.plans.values():
            return len(ps[0].positions)
        return 0

    @classmethod
    def from_two_query(cls, decoder: TwoQueryDecoder) -> "XorDecoder":
        plans = {}
        for i, ps in decoder.plans.items():
            out = []
            for p in ps:
                if decoder.ell != 1 or p.j is None or p.k is None or p.f not in (XOR, XNOR):
                    raise ValueError("decoder output is not the XOR of its queried bits")
                out.append(XorPlan(p.weight, (p.j, p.k), negate=p.f == XNOR))
            plans[i] = tuple(out)
        return cls(decoder.n, decoder.m, plans)


# ----------------------------------------------------------------------------
# constructions


def hadamard_two_query_decoder(n: int) -> TwoQueryDecoder:
    """For target i: j uniform over {0,1}^n, query j and j xor e_i, output the XOR."""
    if n < 1:
        raise ValueError("n must be at least 1")
    m = 1 << n
    w = Fraction(1, m)
    plans = {
        i: tuple(Plan(w, j, j ^ unit_vector(n, i), XOR) for j in range(m)) for i in range(n)
    }
    return TwoQueryDecoder(n, m, plans)


def hadamard_xor_chain_decoder(n: int, q: int) -> XorDecoder:
    """2q-query XOR decoder for the Hadamard code.

    Offsets d_1..d_{q-1} are uniform and d_q = e_i xor d_1 xor ... xor d_{q-1};
    pair p queries (j_p, j_p xor d_p) for uniform j_p.  The XOR of all 2q bits
    is (d_1 xor ... xor d_q).x = x_i on an uncorrupted codeword.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    m = 1 << n
    count = m ** (2 * q - 1)
    if count > 1 << 16:
        raise ValueError("randomness space too large to enumerate")
    w = Fraction(1, count)
    plans = {}
    for i in range(n):
        ps = []
        for offs in product(range(m), repeat=q - 1):
            last = unit_vector(n, i)
            for d in offs:
                last ^= d
            ds = offs + (last,)
            for js in product(range(m), repeat=q):
                pos = []
                for j, d in zip(js, ds):
                    pos.extend((j, j ^ d))
                ps.append(XorPlan(w, tuple(pos)))
        plans[i] = tuple(ps)
    return XorDecoder(n, m, plans)


# ----------------------------------------------------------------------------
# evaluation


def _check_target(decoder, x, i):
    if i not in decoder.plans:
        raise ValueError(f"decoder has no plans for target {i}")
    if not 0 <= i < len(x):
        raise ValueError(f"target {i} out of range")


def evaluate_two_query(decoder: TwoQueryDecoder, y: Sequence[int], x: Sequence[int], i: int) -> Fraction:
    """Exact Pr[f(y_j, y_k) = x_i] over the plan distribution."""
    _check_target(decoder, x, i)
    if len(y) != decoder.m:
        raise ValueError("word length does not match the decoder")
    want = x[i]
    hits = defaultdict(int)
    for p in decoder.plans[i]:
        if p.output(y, decoder.ell) == want:
            hits[p.weight] += 1
    return sum((w * c for w, c in hits.items()), Fraction(0))


def evaluate_adaptive(decoder: AdaptiveTwoQueryDecoder, y: Sequence[int], x: Sequence[int], i: int) -> Fraction:
    _check_target(decoder, x, i)
    total = Fraction(0)
    for p in decoder.plans[i]:
        a = y[p.q1]
        b = y[p.q2[a]]
        if p.out[(a << 1) | b] == x[i]:
            total += p.weight
    return total


def evaluate_xor_decoder(decoder: XorDecoder, y: Sequence[int], x: Sequence[int], i: int) -> Fraction:
    _check_target(decoder, x, i)
    total = Fraction(0)
    for p in decoder.plans[i]:
        v = int(p.negate)
        for pos in p.positions:
            v ^= y[pos]
        if v == x[i]:
            total += p.weight
    return total


def average_success(decoder: TwoQueryDecoder, code, i: int) -> Fraction:
    """(1/2^n) sum_x Pr[A^{C(x)}(i) = x_i]."""
    if code.n > MAX_ENUM_N:
        raise ValueError(f"n = {code.n} exceeds the enumeration cap {MAX_ENUM_N}")
    total = Fraction(0)
    for x in all_messages(code.n):
        total += evaluate_two_query(decoder, code(x), x, i)
    return total / (1 << code.n)


# ----------------------------------------------------------------------------
# adaptive -> non-adaptive


def adaptive_to_nonadaptive(adec: AdaptiveTwoQueryDecoder) -> TwoQueryDecoder:
    """Guess the second query in advance; on a wrong guess output a fair coin.

    The guess g is "right" when the branch chosen by q1's actual answer queries
    the same position as q2[g].  The coin is a weight split into a constant-0
    and a constant-1 variant of each plan.
    """
    plans = {}
    for i, ps in adec.plans.items():
        out = []
        for p in ps:
            for g in (0, 1):
                for coin in (0, 1):
                    table = []
                    for a in (0, 1):
                        for b in (0, 1):
                            right = p.q2[a] == p.q2[g]
                            table.append(p.out[(a << 1) | b] if right else coin)
                    out.append(Plan(p.weight / 4, p.q1, p.q2[g], tuple(table)))
        plans[i] = tuple(out)
    return TwoQueryDecoder(adec.n, adec.m, plans)


# ----------------------------------------------------------------------------
# smoothness


@dataclass(frozen=True)
class SmoothReport:
    m: int
    probabilities: Mapping[int, tuple]
    c: Fraction

    def to_json(self) -> str:
        doc = {
            "m": self.m,
            "c": str(self.c),
            "probabilities": {str(i): [str(p) for p in ps] for i, ps in sorted(self.probabilities.items())},
        }
        return json.dumps(doc, separators=(",", ":"))


def _query_probabilities(decoder, i) -> list[Fraction]:
    probs = [Fraction(0)] * decoder.m
    for p in decoder.plans[i]:
        positions = p.queried() if isinstance(p, Plan) else set(p.positions)
        for j in positions:
            probs[j] += p.weight
    return probs


def audit_smoothness(decoder) -> SmoothReport:
    """Exact per-index query probabilities; c = m * max_{i,j} Pr[query j | i]."""
    probs = {i: tuple(_query_probabilities(decoder, i)) for i in sorted(decoder.plans)}
    top = max((p for ps in probs.values() for p in ps), default=Fraction(0))
    return SmoothReport(decoder.m, probs, decoder.m * top)


def heavy_indices(decoder: TwoQueryDecoder, delta, q: int = 2) -> dict[int, frozenset]:
    """Per target, the positions queried with probability above q / (delta m)."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    threshold = Fraction(q) / (delta * decoder.m)
    report = audit_smoothness(decoder)
    return {
        i: frozenset(j for j, p in enumerate(ps) if p > threshold)
        for i, ps in report.probabilities.items()
    }


def kt_smooth(decoder: TwoQueryDecoder, delta, q: int = 2) -> TwoQueryDecoder:
    """Stop querying heavy positions; the plan reads the fixed symbol 0 there instead.

    Feeding 0 at the heavy set H equals running the original decoder on one
    particular corruption of C(x) touching |H| <= delta m positions.
    """
    delta = as_fraction(delta)
    budget = math.floor(delta * decoder.m)
    heavy = heavy_indices(decoder, delta, q)
    plans = {}
    for i, ps in decoder.plans.items():
        h = heavy[i]
        if len(h) > budget:
            raise ValueError(
                f"target {i}: {len(h)} heavy positions exceed the corruption budget {budget}; "
                "input is not a decoder of a (q, delta, eps)-LDC"
            )
        plans[i] = tuple(
            Plan(p.weight, None if p.j in h else p.j, None if p.k in h else p.k, p.f) for p in ps
        )
    return TwoQueryDecoder(decoder.n, decoder.m, plans, ell=decoder.ell)


# ----------------------------------------------------------------------------
# Fourier binarization


def walsh_hadamard(values: Sequence[int]) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform: out[S] = sum_z values[z] (-1)^{|S & z|}."""
    a = np.array(values, dtype=object if any(isinstance(v, Fraction) for v in values) else np.int64)
    size = a.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        for start in range(0, size, 2 * h):
            lo = a[start : start + h].copy()
            hi = a[start + h : start + 2 * h].copy()
            a[start : start + h] = lo + hi
            a[start + h : start + 2 * h] = lo - hi
        h *= 2
    return a


@dataclass(frozen=True)
class FourierSelection:
    S0: int
    T0: int
    sign: int
    eta: Fraction
    correlation: Fraction
    correlations: tuple  # indexed by (S << ell) | T
    coefficients: tuple  # \hat f_{S,T}, same indexing
    ell: int

    def to_json(self) -> str:
        doc = {
            "S0": self.S0,
            "T0": self.T0,
            "sign": self.sign,
            "eta": str(self.eta),
            "correlation": str(self.correlation),
            "ell": self.ell,
            "coefficients": [str(c) for c in self.coefficients],
        }
        return json.dumps(doc, separators=(",", ":"))


def _symbol(word, pos):
    return 0 if pos is None else word[pos]


def fourier_select(f: Sequence[int], code: AlphabetCode, j: int | None, k: int | None, i: int) -> FourierSelection:
    """Pick the character chi_S(a) chi_T(b) best correlated with (-1)^{x_i}.

    Correlations E_x[chi_S(a) chi_T(b) (-1)^{x_i}] with a = C(x)_j, b = C(x)_k
    are computed by enumerating all x.  Ties go to the lexicographically
    smallest (S, T).
    """
    ell = code.ell
    if code.n > MAX_ENUM_N or ell > MAX_ELL:
        raise ValueError("instance exceeds the exact-enumeration caps")
    size = 1 << (2 * ell)
    if len(f) != size:
        raise ValueError(f"truth table must have {size} entries")
    # g(a, b) = sum over x landing on (a, b) of (-1)^{x_i}
    g = [0] * size
    for x in all_messages(code.n):
        word = code(x)
        g[(_symbol(word, j) << ell) | _symbol(word, k)] += -1 if x[i] else 1
    denom = 1 << code.n
    corr = tuple(Fraction(int(v), denom) for v in walsh_hadamard(g))
    signed_f = [-1 if v else 1 for v in f]
    coeffs = tuple(Fraction(int(v), size) for v in walsh_hadamard(signed_f))
    two_eta = Fraction(sum(gv * sv for gv, sv in zip(g, signed_f)), denom)
    eta = max(Fraction(0), two_eta / 2)
    best = max(range(size), key=lambda z: (abs(corr[z]), -z))
    c0 = corr[best]
    return FourierSelection(
        S0=best >> ell,
        T0=best & ((1 << ell) - 1),
        sign=-1 if c0 < 0 else 1,
        eta=eta,
        correlation=c0,
        correlations=corr,
        coefficients=coeffs,
        ell=ell,
    )


@dataclass(frozen=True)
class TrevisanResult:
    code: BinaryCode
    decoder: TwoQueryDecoder
    selections: Mapping[int, tuple]
    average_success: Mapping[int, Fraction]
    original_average_success: Mapping[int, Fraction]
    smoothness: SmoothReport


def trevisan_binarize(decoder: TwoQueryDecoder, code: AlphabetCode, c=None, eps=None) -> TrevisanResult:
    """Binary average-case decoder reading one Hadamard bit of each queried symbol.

    Plans with no average advantage become a fair coin; the others query bit
    S0 of symbol j and bit T0 of symbol k of the binarized code and output
    their XOR, negated when the selected correlation is negative.
    """
    if decoder.ell != code.ell or decoder.m != code.m:
        raise ValueError("decoder and code disagree on alphabet or length")
    ell = code.ell
    original = {i: average_success(decoder, code, i) for i in decoder.targets()}
    if c is not None and audit_smoothness(decoder).c > as_fraction(c):
        raise ValueError("premise audit failed: decoder is not c-smooth")
    if eps is not None and any(v < Fraction(1, 2) + as_fraction(eps) for v in original.values()):
        raise ValueError("premise audit failed: average advantage below eps")
    width = 1 << ell
    binary = symbol_binarize(code)
    half = Fraction(1, 2)
    plans, selections = {}, {}
    for i, ps in decoder.plans.items():
        out, sel = [], []
        for p in ps:
            s = fourier_select(p.f, code, p.j, p.k, i)
            sel.append(s)
            if s.eta <= 0:
                out.append(Plan(p.weight * half, None, None, constant_table(0)))
                out.append(Plan(p.weight * half, None, None, constant_table(1)))
                continue
            nj = None if p.j is None else p.j * width + s.S0
            nk = None if p.k is None else p.k * width + s.T0
            out.append(Plan(p.weight, nj, nk, XOR if s.sign > 0 else XNOR))
        plans[i] = tuple(out)
        selections[i] = tuple(sel)
    new = TwoQueryDecoder(code.n, binary.m, plans)
    avg = {i: average_success(new, binary, i) for i in new.targets()}
    return TrevisanResult(binary, new, selections, avg, original, audit_smoothness(new))


# ----------------------------------------------------------------------------
# certification by exhaustive corruption


def all_patterns(m: int, budget: int):
    for size in range(budget + 1):
        yield from combinations(range(m), size)


def certify_epsilon(code, success: Callable[[Sequence[int], Sequence[int], int], Fraction], delta, targets=None) -> Fraction:
    """min over x, i and all corruptions of at most floor(delta m) bits of success - 1/2."""
    if code.n > MAX_ENUM_N:
        raise ValueError("n exceeds the enumeration cap")
    budget = math.floor(as_fraction(delta) * code.m)
    targets = range(code.n) if targets is None else targets
    worst = None
    patterns = list(all_patterns(code.m, budget))
    for x in all_messages(code.n):
        cw = code(x)
        for pat in patterns:
            y = list(cw)
            for p in pat:
                y[p] ^= 1
            y = tuple(y)
            for i in targets:
                v = success(y, x, i)
                if worst is None or v < worst:
                    worst = v
    return worst - Fraction(1, 2)


# ----------------------------------------------------------------------------
# JSON


def _table_to_hex(f) -> str:
    v = 0
    for bit in f:
        v = (v << 1) | bit
    return format(v, f"0{max(1, -(-len(f) // 4))}x")


def _hex_to_table(text: str, size: int) -> tuple[int, ...]:
    v = int(text, 16)
    return tuple((v >> (size - 1 - z)) & 1 for z in range(size))


def decoder_to_json(decoder: TwoQueryDecoder) -> str:
    targets = [
        {
            "i": i,
            "plans": [
                {"weight": str(p.weight), "j": p.j, "k": p.k, "f": _table_to_hex(p.f)}
                for p in decoder.plans[i]
            ],
        }
        for i in decoder.targets()
    ]
    doc = {"n": decoder.n, "m": decoder.m, "ell": decoder.ell, "targets": targets}
    return json.dumps(doc, separators=(",", ":"))


def decoder_from_json(text: str) -> TwoQueryDecoder:
    doc = json.loads(text)
    size = 1 << (2 * doc["ell"])
    plans = {
        t["i"]: tuple(
            Plan(Fraction(p["weight"]), p["j"], p["k"], _hex_to_table(p["f"], size)) for p in t["plans"]
        )
        for t in doc["targets"]
    }
    return TwoQueryDecoder(doc["n"], doc["m"], plans, ell=doc["ell"])
