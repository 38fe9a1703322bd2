"""Random access codes extracted from one-query quantum decoders, and the
entropy audit behind the linear lower bound on such codes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .bounds import binary_entropy
from .cdec import MAX_ENUM_N, as_fraction
from .codes import all_messages, bits_to_int
from .qcore import (
    DensityMatrix,
    Povm,
    QuantumState,
    control_index_labels,
    measure_povm,
    reduced_density,
    von_neumann_entropy,
)
from .qdec import QuantumDecoder, WordSpaceQuery, word_space_form

__all__ = [
    "STANDARD",
    "IMPROVED",
    "UniformCodeState",
    "AmplitudeSplit",
    "RecoveryCalibration",
    "RacResult",
    "Inequality",
    "EntropyLedger",
    "build_uniform_state",
    "split_query",
    "extraction_povm",
    "small_part",
    "calibrate",
    "rac_recover_bit",
    "pm_decomposition_defect",
    "pad_state",
    "nayak_audit",
]

STANDARD = "standard"
IMPROVED = "improved"
AUDIT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class UniformCodeState:
    m: int
    state: QuantumState

    @property
    def qubits(self) -> float:
        return math.log2(2 * self.m)


def build_uniform_state(code, x: Sequence[int]) -> UniformCodeState:
    """|U(x)> = (2m)^{-1/2} sum_{c, j} (-1)^{c C(x)_j} |c, j>."""
    word = code(x)
    m = len(word)
    if m < 1:
        raise ValueError("code length must be at least 1")
    amps = np.ones(2 * m) / math.sqrt(2 * m)
    amps[m:] *= [-1.0 if b else 1.0 for b in word]
    return UniformCodeState(m, QuantumState(amps, labels=control_index_labels(m)))


def _mode_factor(mode: str) -> Fraction:
    if mode == STANDARD:
        return Fraction(1)
    if mode == IMPROVED:
        return Fraction(3, 2)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class AmplitudeSplit:
    m: int
    in_A: tuple
    a_sq: Fraction
    threshold_sq: Fraction
    mode: str

    @property
    def a(self) -> float:
        return math.sqrt(self.a_sq)

    @property
    def B(self) -> tuple:
        labels = control_index_labels(self.m)
        return tuple(l for l, inside in zip(labels, self.in_A) if not inside)

    @property
    def A(self) -> tuple:
        labels = control_index_labels(self.m)
        return tuple(l for l, inside in zip(labels, self.in_A) if inside)


def split_query(query: WordSpaceQuery, delta, mode: str = STANDARD) -> AmplitudeSplit:
    """Small amplitudes (alpha^2 <= 1/(delta m), or 2/(3 delta m) in improved mode) form A."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    factor = _mode_factor(mode)
    dm = delta * query.m
    threshold = 1 / (factor * dm)
    alpha_sq = [as_fraction(a) for a in query.alpha_sq]
    in_A = tuple(a <= threshold for a in alpha_sq)
    b_size = in_A.count(False)
    if mode == STANDARD and b_size >= dm and b_size > 0:
        raise ValueError(f"|B| = {b_size} is not below delta m = {dm}")
    if mode == IMPROVED and b_size > dm:
        raise ValueError(f"|B| = {b_size} exceeds delta m = {dm}")
    a_sq = sum((a for a, inside in zip(alpha_sq, in_A) if inside), Fraction(0))
    return AmplitudeSplit(query.m, in_A, a_sq, threshold, mode)


def _kraus_diagonal(query: WordSpaceQuery, split: AmplitudeSplit, delta) -> np.ndarray:
    scale = _mode_factor(split.mode) * as_fraction(delta) * split.m
    diag_sq = [scale * as_fraction(a) if inside else Fraction(0) for a, inside in zip(query.alpha_sq, split.in_A)]
    if any(d > 1 for d in diag_sq):
        raise ValueError("scaled amplitude exceeds 1; I - M*M would not be positive")
    return np.sqrt(np.array([float(d) for d in diag_sq]))


def extraction_povm(query: WordSpaceQuery, split: AmplitudeSplit, delta) -> Povm:
    """{M*M, I - M*M} with M = sqrt(delta m) sum_A alpha_cj |cj><cj| (times sqrt(3/2) when improved)."""
    d = _kraus_diagonal(query, split, delta)
    M = np.diag(d)
    rest = np.diag(np.sqrt(np.clip(1.0 - d**2, 0.0, None)))
    return Povm.from_kraus((M, rest))


def small_part(query: WordSpaceQuery, split: AmplitudeSplit, word: Sequence[int]) -> np.ndarray:
    """Unnormalized |A(x)> = sum_A (-1)^{c y_j} alpha_cj |c, j>."""
    return query.response(word) * np.array(split.in_A, dtype=float)


@dataclass(frozen=True)
class RecoveryCalibration:
    q1: float
    q0: float
    q: float
    reversed: bool
    already_done: bool

    def pr_output_one(self, p: float) -> float:
        """Output distribution of the biased procedure given p = <v|D|v>."""
        if self.reversed:
            return self.q + (1 - self.q) * p
        return (1 - self.q) * p


def calibrate(code, query: WordSpaceQuery, i: int, split: AmplitudeSplit, eps=None) -> RecoveryCalibration:
    """q1 = min_{x_i=1} p(A(x)/a), q0 = max_{x_i=0} p(A(x)/a), and the coin bias q."""
    if code.n > MAX_ENUM_N:
        raise ValueError("n exceeds the enumeration cap")
    if split.a_sq == 0:
        raise ValueError("small-amplitude part is empty")
    ones, zeros = [], []
    for x in all_messages(code.n):
        v = small_part(query, split, code(x)) / split.a
        (ones if x[i] else zeros).append(query.p_one(v))
    q1, q0 = min(max(min(ones), 0.0), 1.0), min(max(max(zeros), 0.0), 1.0)
    if q1 < q0:
        raise ValueError(f"q1 = {q1} < q0 = {q0}: decoder carries no information on this bit")
    a_sq = float(split.a_sq)
    e = float(as_fraction(eps)) / a_sq if eps is not None else (q1 - q0) / 2
    if eps is not None and q1 - q0 < 2 * e - 1e-12:
        raise ValueError(f"gap q1 - q0 = {q1 - q0} is below 2 eps / a^2 = {2 * e}")
    rev = not q1 >= 0.5 + e - 1e-12
    if rev:
        q1, q0 = 1 - q0, 1 - q1
    if q1 + q0 >= 1:
        return RecoveryCalibration(q1, q0, 1 - 1 / (q1 + q0), rev, False)
    return RecoveryCalibration(q1, q0, 0.0, rev, True)


@dataclass(frozen=True)
class RacResult:
    i: int
    mode: str
    delta: Fraction
    split: AmplitudeSplit
    calibration: RecoveryCalibration
    success: Mapping[tuple, float]
    extraction_probability: Mapping[tuple, float]
    post_state_fidelity: Mapping[tuple, float]
    bound: float | None

    @property
    def worst(self) -> float:
        return min(self.success.values())

    @property
    def average(self) -> float:
        return float(np.mean(list(self.success.values())))


def rac_recover_bit(code, decoder: QuantumDecoder | WordSpaceQuery, i: int, delta, mode: str = STANDARD, eps=None) -> RacResult:
    """Recover x_i from |U(x)> for every x: extract |A(x)>/a, then run the biased procedure.

    On the extraction POVM's second outcome the result is a fair coin.
    """
    delta = as_fraction(delta)
    query = decoder if isinstance(decoder, WordSpaceQuery) else word_space_form(decoder, i)
    split = split_query(query, delta, mode)
    povm = extraction_povm(query, split, delta)
    cal = calibrate(code, query, i, split, eps)
    success, extract, fidelity = {}, {}, {}
    for x in all_messages(code.n):
        u = build_uniform_state(code, x)
        dist = measure_povm(u.state, povm)
        p_ext = dist[0]
        if p_ext > 1e-15:
            post = dist.post_states[0]
            target = small_part(query, split, code(x)) / split.a
            fid = float(np.real(np.vdot(target, post.entries @ target)))
            p = float(np.real(np.trace(query.D @ post.entries)))
            p1 = cal.pr_output_one(p)
            correct = p1 if x[i] else 1 - p1
        else:
            fid, correct = 1.0, 0.5
        success[x] = p_ext * correct + (1 - p_ext) * 0.5
        extract[x] = p_ext
        fidelity[x] = fid
    bound = None
    if eps is not None:
        e = float(as_fraction(eps))
        bound = 0.5 + (float(delta) * e / 4 if mode == STANDARD else 3 * float(delta) * e / 8)
    return RacResult(i, mode, delta, split, cal, success, extract, fidelity, bound)


def pm_decomposition_defect(query: WordSpaceQuery, split: AmplitudeSplit, word: Sequence[int]) -> float:
    """p(A+B) + p(A-B) - 2(p(A) + p(B)); zero up to rounding for any D."""
    A = small_part(query, split, word)
    B = query.alpha * (1.0 - np.array(split.in_A, dtype=float))
    return query.p_one(A + B) + query.p_one(A - B) - 2 * (query.p_one(A) + query.p_one(B))


def pad_state(state: QuantumState, dim: int) -> QuantumState:
    if dim < state.dim:
        raise ValueError("cannot pad to a smaller dimension")
    amps = np.zeros(dim, dtype=complex)
    amps[: state.dim] = state.amplitudes
    return QuantumState(amps)


# ----------------------------------------------------------------------------
# entropy audit


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float
    relation: str  # "<=", ">=" or "=="
    tol: float = AUDIT_TOL

    @property
    def slack(self) -> float:
        if self.relation == "<=":
            return self.rhs - self.lhs
        if self.relation == ">=":
            return self.lhs - self.rhs
        return -abs(self.lhs - self.rhs)

    @property
    def holds(self) -> bool:
        return self.slack >= -self.tol

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "slack": self.slack,
            "pass": self.holds,
        }


@dataclass(frozen=True)
class EntropyLedger:
    n: int
    qubits: float
    values: Mapping[str, float]
    recovery: Mapping[str, tuple]
    inequalities: tuple

    @property
    def ok(self) -> bool:
        return all(q.holds for q in self.inequalities)

    def violations(self) -> list[Inequality]:
        return [q for q in self.inequalities if not q.holds]

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "qubits": self.qubits,
            "values": dict(self.values),
            "recovery": {k: list(v) for k, v in self.recovery.items()},
            "inequalities": [q.as_dict() for q in self.inequalities],
            "ok": self.ok,
        }
        return json.dumps(doc, separators=(",", ":"))


def nayak_audit(encoding: Sequence, p_worst: Sequence[float], p_avg: Sequence[float] | None = None) -> EntropyLedger:
    """Numerically walk the entropy chain (1 - H(p)) n <= S(X:M) <= qubits.

    ``encoding[x]`` is the state for message x (x as an integer, first bit most
    significant); the joint state is 2^-n sum_x |x><x| (x) rho_x.
    """
    N = len(encoding)
    n = N.bit_length() - 1
    if N != 1 << n or n < 1:
        raise ValueError("need one state per message in {0,1}^n")
    if len(p_worst) != n:
        raise ValueError("need one recovery probability per bit")
    rhos = [r.density() if isinstance(r, QuantumState) else r for r in encoding]
    d = rhos[0].dim
    if any(r.dim != d for r in rhos):
        raise ValueError("all encoded states must share one dimension")
    qubits = math.log2(d)
    if d != 1 << round(qubits):
        raise ValueError(f"encoded dimension {d} is not a power of two; pad it first")
    qubits = float(round(qubits))

    joint = np.zeros((N * d, N * d), dtype=complex)
    for x, r in enumerate(rhos):
        joint[x * d : (x + 1) * d, x * d : (x + 1) * d] = r.entries / N
    XM = DensityMatrix(joint, dims=(2,) * n + (d,))
    S_XM = von_neumann_entropy(XM)
    S_X = von_neumann_entropy(reduced_density(XM, range(n)))
    rho_M = reduced_density(XM, n)
    S_M = von_neumann_entropy(rho_M)
    S_XgM = S_XM - S_M
    I_XM = S_X + S_M - S_XM
    avg_rho_entropy = float(np.mean([von_neumann_entropy(r) for r in rhos]))
    S_XigM = []
    for i in range(n):
        S_XigM.append(von_neumann_entropy(reduced_density(XM, (i, n))) - S_M)
    sum_XigM = float(sum(S_XigM))
    p = min(p_worst)
    Hp = binary_entropy(p)

    ineq = [
        Inequality("S(XM) = n + avg S(rho_x)", S_XM, n + avg_rho_entropy, "=="),
        Inequality("S(XM) >= S(X) = n", S_XM, S_X, ">="),
        Inequality("S(X) = n", S_X, float(n), "=="),
        Inequality("S(M) <= qubits", S_M, qubits, "<="),
        Inequality("S(X:M) <= S(M)", I_XM, S_M, "<="),
        Inequality("S(X|M) <= sum_i S(X_i|M)", S_XgM, sum_XigM, "<="),
    ]
    for i, (pi, s) in enumerate(zip(p_worst, S_XigM)):
        ineq.append(Inequality(f"Fano: H(p_{i}) >= S(X_{i}|M)", binary_entropy(pi), s, ">="))
    if p_avg is not None:
        for i, (pi, s) in enumerate(zip(p_avg, S_XigM)):
            ineq.append(Inequality(f"Fano (average): H(pavg_{i}) >= S(X_{i}|M)", binary_entropy(pi), s, ">="))
    ineq += [
        Inequality("(1-H(p))n <= S(X) - sum_i S(X_i|M)", (1 - Hp) * n, S_X - sum_XigM, "<="),
        Inequality("S(X) - sum_i S(X_i|M) <= S(X:M)", S_X - sum_XigM, I_XM, "<="),
        Inequality("S(X:M) <= qubits", I_XM, qubits, "<="),
        Inequality("(1-H(p))n <= qubits", (1 - Hp) * n, qubits, "<="),
    ]
    values = {
        "S(XM)": S_XM,
        "S(X)": S_X,
        "S(M)": S_M,
        "S(X:M)": I_XM,
        "S(X|M)": S_XgM,
        "sum_i S(X_i|M)": sum_XigM,
        "avg S(rho_x)": avg_rho_entropy,
        "H(p)": Hp,
        "p": p,
    }
    for i, s in enumerate(S_XigM):
        values[f"S(X_{i}|M)"] = s
    recovery = {"worst": tuple(float(v) for v in p_worst)}
    if p_avg is not None:
        recovery["average"] = tuple(float(v) for v in p_avg)
    return EntropyLedger(n, qubits, values, recovery, tuple(ineq))
