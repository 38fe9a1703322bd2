"""One-quantum-query gadgets and the compilers from classical to quantum decoders.

Every probability here is exact: query and measurement states are
:class:`~qldc.qcore.SurdState` objects, so each outcome probability is a
squared rational inner product.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .cdec import TwoQueryDecoder, XorDecoder, as_fraction
from .qcore import SurdState, control_index_labels

__all__ = [
    "GADGET_LABELS",
    "GADGET_QUERY",
    "gadget_basis",
    "gadget_postprocess",
    "gadget_outcome_distribution",
    "run_gadget",
    "gadget_trace",
    "xor_gadget",
    "xor_gadget_distribution",
    "GadgetPlan",
    "QXorPlan",
    "QuantumDecoder",
    "LqdcParams",
    "compile_2ldc_to_1lqdc",
    "compile_xor_ldc_to_lqdc",
    "evaluate_lqdc",
    "plan_output_one",
    "WordSpaceQuery",
    "word_space_form",
]

# local gadget space, control bit major
GADGET_LABELS = ((0, 1), (0, 2), (1, 1), (1, 2))
GADGET_QUERY = SurdState(Fraction(1, 3), (1, 0, 1, 1), GADGET_LABELS)

XOR_LABELS = ((1, 1), (1, 2))
XOR_QUERY = SurdState(Fraction(1, 2), (1, 1), XOR_LABELS)
XOR_BASIS = (
    SurdState(Fraction(1, 2), (1, 1), XOR_LABELS),
    SurdState(Fraction(1, 2), (1, -1), XOR_LABELS),
)

HALF = Fraction(1, 2)


def _sign(bit: int) -> int:
    return -1 if bit & 1 else 1


def gadget_basis() -> tuple[SurdState, ...]:
    """|psi_b> = (|0,1> + (-1)^{b1}|1,1> + (-1)^{b2}|1,2> + (-1)^{b1+b2}|0,2>)/2, b = (b1 << 1) | b2."""
    out = []
    for b in range(4):
        b1, b2 = b >> 1, b & 1
        out.append(SurdState(Fraction(1, 4), (1, _sign(b1 ^ b2), _sign(b1), _sign(b2)), GADGET_LABELS))
    return tuple(out)


_BASIS = gadget_basis()


def gadget_postprocess(f: Sequence[int]) -> tuple[Fraction, ...]:
    """Pr[output 1 | outcome b] for each outcome b, chosen so Pr[output f(a)] = 11/14."""
    f = tuple(int(v) & 1 for v in f)
    if len(f) != 4:
        raise ValueError("f must be a truth table on {0,1}^2")
    ones = sum(f)
    if ones == 0:
        return (Fraction(3, 14),) * 4
    if ones == 4:
        return (Fraction(11, 14),) * 4
    if ones == 1:
        return tuple(Fraction(1) if v else Fraction(1, 7) for v in f)
    if ones == 3:
        return tuple(Fraction(6, 7) if v else Fraction(0) for v in f)
    return tuple(Fraction(13, 14) if v else Fraction(1, 14) for v in f)


@lru_cache(maxsize=None)
def gadget_outcome_distribution(a1: int, a2: int) -> tuple[Fraction, ...]:
    """Outcome probabilities of the gadget measurement after the query on a = (a1, a2)."""
    phi = GADGET_QUERY.with_signs((1, 1, _sign(a1), _sign(a2)))
    probs = tuple(psi.overlap_squared(phi) for psi in _BASIS)
    if sum(probs) != 1:
        raise AssertionError("gadget basis measurement is not normalized")
    return probs


def run_gadget(f: Sequence[int], a: Sequence[int]) -> dict[int, Fraction]:
    """Output distribution {0: p0, 1: p1} of the one-query gadget for f on a."""
    probs = gadget_outcome_distribution(int(a[0]) & 1, int(a[1]) & 1)
    post = gadget_postprocess(f)
    p1 = sum(p * w for p, w in zip(probs, post))
    return {0: 1 - p1, 1: p1}


def gadget_trace(f: Sequence[int], a: Sequence[int]) -> dict:
    """JSON-ready record of one gadget run."""
    a1, a2 = int(a[0]) & 1, int(a[1]) & 1
    after = GADGET_QUERY.with_signs((1, 1, _sign(a1), _sign(a2)))

    def amps(s):
        return [f"{c}/sqrt({1 / s.scale})" if c else "0" for c in s.coeffs]

    return {
        "f": list(f),
        "a": [a1, a2],
        "labels": [list(l) for l in GADGET_LABELS],
        "query_state": amps(GADGET_QUERY),
        "post_oracle_state": amps(after),
        "outcome_probabilities": [str(p) for p in gadget_outcome_distribution(a1, a2)],
        "postprocess_pr_output_1": [str(w) for w in gadget_postprocess(f)],
        "output_distribution": {str(k): str(v) for k, v in run_gadget(f, a).items()},
    }


@lru_cache(maxsize=None)
def xor_gadget_distribution(a1: int, a2: int) -> tuple[Fraction, Fraction]:
    """(Pr[output 0], Pr[output 1]) after querying (|1,1> + |1,2>)/sqrt 2 and measuring in the +/- basis."""
    after = XOR_QUERY.with_signs((_sign(a1), _sign(a2)))
    p0, p1 = (b.overlap_squared(after) for b in XOR_BASIS)
    return p0, p1


def xor_gadget(pair: tuple[int, int], y: Sequence[int]) -> int:
    """y_j xor y_k from one phase query, with certainty."""
    j, k = pair
    if j == k:
        raise ValueError("the two positions must differ")
    p0, p1 = xor_gadget_distribution(y[j] & 1, y[k] & 1)
    if p0 not in (0, 1):
        raise AssertionError("XOR gadget outcome is not deterministic")
    return 1 if p1 == 1 else 0


# ----------------------------------------------------------------------------
# quantum decoders


@dataclass(frozen=True)
class GadgetPlan:
    """One gadget query on positions (j, k); ``None`` reads a fixed 0 (no phase)."""

    weight: Fraction
    j: int | None
    k: int | None
    f: tuple

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "f", tuple(int(v) for v in self.f))


@dataclass(frozen=True)
class QXorPlan:
    """One XOR gadget per pair; the output is the XOR of the pair results."""

    weight: Fraction
    pairs: tuple
    negate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))


@dataclass(frozen=True)
class LqdcParams:
    q: int
    delta: Fraction
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if not 0 < self.eps <= HALF:
            raise ValueError("eps must lie in (0, 1/2]")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class QuantumDecoder:
    """Rational mixture of quantum plans per target, making ``queries`` queries each."""

    n: int
    m: int
    queries: int
    plans: Mapping[int, tuple]

    def __post_init__(self):
        plans = {int(i): tuple(ps) for i, ps in self.plans.items()}
        for i, ps in plans.items():
            if sum(p.weight for p in ps) != 1 or any(p.weight < 0 for p in ps):
                raise ValueError(f"target {i}: plan weights must form a distribution")
        object.__setattr__(self, "plans", plans)

    def targets(self):
        return sorted(self.plans)


def compile_2ldc_to_1lqdc(decoder: TwoQueryDecoder) -> QuantumDecoder:
    """Same randomness; each classical plan becomes one gadget query.

    A plan with j == k is padded: the second gadget branch reads a fixed 0 and
    the truth table is rewritten to depend on the first argument only.
    """
    if decoder.ell != 1:
        raise ValueError("binary decoders only")
    plans = {}
    for i, ps in decoder.plans.items():
        out = []
        for p in ps:
            j, k, f = p.j, p.k, p.f
            if j is not None and j == k:
                f = tuple(f[(a << 1) | a] for a in (0, 1) for _ in (0, 1))
                k = None
            out.append(GadgetPlan(p.weight, j, k, f))
        plans[i] = tuple(out)
    return QuantumDecoder(decoder.n, decoder.m, 1, plans)


def compile_xor_ldc_to_lqdc(decoder: TwoQueryDecoder | XorDecoder) -> QuantumDecoder:
    """2q-query XOR decoder -> q-query quantum decoder, consecutive queries paired."""
    if isinstance(decoder, TwoQueryDecoder):
        decoder = XorDecoder.from_two_query(decoder)
    if not isinstance(decoder, XorDecoder):
        raise TypeError("expected a TwoQueryDecoder or XorDecoder")
    q2 = decoder.queries
    if q2 % 2:
        raise ValueError("XOR decoder must make an even number of queries")
    plans = {}
    for i, ps in decoder.plans.items():
        plans[i] = tuple(
            QXorPlan(p.weight, tuple(zip(p.positions[0::2], p.positions[1::2])), p.negate) for p in ps
        )
    return QuantumDecoder(decoder.n, decoder.m, q2 // 2, plans)


def plan_output_one(plan, y: Sequence[int]) -> Fraction:
    """Exact Pr[plan outputs 1] when the oracle holds word y."""
    if isinstance(plan, GadgetPlan):
        a1 = 0 if plan.j is None else y[plan.j]
        a2 = 0 if plan.k is None else y[plan.k]
        return run_gadget(plan.f, (a1, a2))[1]
    if isinstance(plan, QXorPlan):
        p1 = Fraction(int(plan.negate))
        for j, k in plan.pairs:
            if j == k:
                continue  # y_j xor y_j = 0 needs no query
            q0, q1 = xor_gadget_distribution(y[j] & 1, y[k] & 1)
            p1 = p1 * q0 + (1 - p1) * q1
        return p1
    raise TypeError(f"unknown plan type {type(plan).__name__}")


def evaluate_lqdc(decoder: QuantumDecoder, y: Sequence[int], x: Sequence[int], i: int) -> Fraction:
    """Exact Pr[decoder outputs x_i] with the phase oracle holding word y."""
    if i not in decoder.plans:
        raise ValueError(f"decoder has no plans for target {i}")
    if len(y) != decoder.m:
        raise ValueError("word length does not match the decoder")
    total = Fraction(0)
    for p in decoder.plans[i]:
        p1 = plan_output_one(p, y)
        total += p.weight * (p1 if x[i] else 1 - p1)
    return total


# ----------------------------------------------------------------------------
# single-query form over (c, j) labels, used by the random-access-code reduction


@dataclass(frozen=True, eq=False)
class WordSpaceQuery:
    """A one-query decoder written as one query |Q> = sum alpha_cj |c, j> and one POVM {D, I - D}.

    ``alpha_sq`` holds the exact squared amplitudes in the order of
    :func:`qldc.qcore.control_index_labels`; ``D`` is the outcome-1 operator.
    """

    m: int
    alpha_sq: tuple
    D: np.ndarray

    @property
    def labels(self):
        return control_index_labels(self.m)

    @property
    def alpha(self) -> np.ndarray:
        return np.sqrt(np.array([float(a) for a in self.alpha_sq]))

    def response(self, y: Sequence[int]) -> np.ndarray:
        signs = np.ones(2 * self.m)
        signs[self.m :] = [-1.0 if b else 1.0 for b in y]
        return self.alpha * signs

    def p_one(self, v: np.ndarray) -> float:
        """<v|D|v> for an arbitrary (possibly unnormalized) vector."""
        v = np.asarray(v, dtype=complex)
        return float(np.real(np.vdot(v, self.D @ v)))

    def success_on_word(self, y: Sequence[int], bit: int) -> float:
        p1 = self.p_one(self.response(y))
        return p1 if bit else 1.0 - p1


def _plan_word_form(plan, m: int):
    """(squared amplitudes by word label index, outcome-1 operator) for one plan."""
    lab = {l: z for z, l in enumerate(control_index_labels(m))}
    asq = [Fraction(0)] * (2 * m)
    D = np.zeros((2 * m, 2 * m))
    if isinstance(plan, GadgetPlan):
        if plan.j is None or plan.k is None or plan.j == plan.k or m < 2:
            raise ValueError("word-space form needs two distinct queried positions")
        idx = [lab[(0, 1)], lab[(0, 2)], lab[(1, plan.j + 1)], lab[(1, plan.k + 1)]]
        for z, ix in enumerate(idx):
            asq[ix] = GADGET_QUERY.amplitude_squared(z)
        for w, psi in zip(gadget_postprocess(plan.f), _BASIS):
            v = np.zeros(2 * m)
            v[idx] = [c * math.sqrt(psi.scale) for c in psi.coeffs]
            D += float(w) * np.outer(v, v)
        return asq, D
    if isinstance(plan, QXorPlan):
        if len(plan.pairs) != 1 or plan.pairs[0][0] == plan.pairs[0][1]:
            raise ValueError("word-space form needs a single pair of distinct positions")
        j, k = plan.pairs[0]
        idx = [lab[(1, j + 1)], lab[(1, k + 1)]]
        for ix in idx:
            asq[ix] = HALF
        basis = XOR_BASIS[0] if plan.negate else XOR_BASIS[1]
        v = np.zeros(2 * m)
        v[idx] = [c * math.sqrt(basis.scale) for c in basis.coeffs]
        D += np.outer(v, v)
        return asq, D
    raise TypeError(f"unknown plan type {type(plan).__name__}")


def _householder(v: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Real orthogonal symmetric H with H v = u for unit vectors v, u."""
    w = v - u
    nw = float(w @ w)
    if nw < 1e-30:
        return np.eye(v.size)
    return np.eye(v.size) - 2.0 * np.outer(w, w) / nw


def word_space_form(decoder: QuantumDecoder, i: int, spread_control: bool = True) -> WordSpaceQuery:
    """Fold the decoder's randomness into workspace: one query, one POVM.

    With plan weights p_r, queries alpha^r and outcome operators D_r, the
    single query has alpha_cj^2 = sum_r p_r (alpha^r_cj)^2, and the workspace
    isometry |c,j> -> sum_r sqrt(p_r) alpha^r_cj / alpha_cj |r>|c,j> commutes
    with the oracle, giving D = sum_r V_r D_r V_r.  With ``spread_control``
    the c = 0 amplitude is rotated onto the uniform superposition over j (the
    oracle ignores c = 0, so the decoder's behaviour is unchanged).
    """
    if decoder.queries != 1:
        raise ValueError("single-query decoders only")
    m = decoder.m
    forms = [(p.weight, *_plan_word_form(p, m)) for p in decoder.plans[i]]
    alpha_sq = [sum((w * a[z] for w, a, _ in forms), Fraction(0)) for z in range(2 * m)]
    D = np.zeros((2 * m, 2 * m))
    for w, a, Dr in forms:
        v = np.array(
            [math.sqrt(float(w * a[z] / alpha_sq[z])) if alpha_sq[z] else 0.0 for z in range(2 * m)]
        )
        D += v[:, None] * Dr * v[None, :]
    control_mass = sum(alpha_sq[:m], Fraction(0))
    if spread_control and control_mass:
        c0 = np.sqrt(np.array([float(a) for a in alpha_sq[:m]]))
        c0 /= np.linalg.norm(c0)
        H = np.eye(2 * m)
        H[:m, :m] = _householder(c0, np.full(m, 1.0 / math.sqrt(m)))
        D = H @ D @ H.T
        alpha_sq[:m] = [control_mass / m] * m
    D = (D + D.T) / 2
    return WordSpaceQuery(m, tuple(alpha_sq), D)


def decoder_trace_json(f, a) -> str:
    return json.dumps(gadget_trace(f, a), separators=(",", ":"))
