"""Multi-server PIR schemes, privacy audits, and their quantum-server reductions.

Queries are t-bit integers (first bit most significant), answers are
a_len-bit integers.  A scheme's randomness is an explicit finite list drawn
uniformly.  Server indices are 0-based throughout.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .cdec import Plan, SmoothReport, TwoQueryDecoder, audit_smoothness
from .codes import AlphabetCode, all_messages, bits_to_int, parity, unit_vector
from .qcore import QuantumState, trace_distance
from .qdec import GADGET_LABELS, XOR_BASIS, gadget_basis, gadget_postprocess, run_gadget, xor_gadget_distribution
from .rac import EntropyLedger, nayak_audit, pad_state

__all__ = [
    "MAX_T",
    "PirScheme",
    "PrivacyReport",
    "QuantumPirProtocol",
    "PirRac",
    "xor2_scheme",
    "cube_scheme",
    "leaky_scheme",
    "constant_scheme",
    "scheme_from_descriptor",
    "classical_privacy_audit",
    "evaluate_pir",
    "reduce_2server_to_1quantum",
    "reduce_2k_to_k_quantum",
    "evaluate_quantum_pir",
    "simulate_quantum_pir",
    "quantum_privacy_audit",
    "pir_to_rac",
    "pir_to_smooth",
    "transcript_csv",
]

MAX_T = 12


@dataclass(frozen=True, eq=False)
class PirScheme:
    """k servers, t-bit queries, a_len-bit answers.

    ``query_gen(i, r)`` returns the k queries, ``answer(s, x, q)`` is server s's
    deterministic answer, ``reconstruct(i, r, answers)`` returns Pr[output 1].
    """

    k: int
    n: int
    t: int
    a_len: int
    randomness: tuple
    query_gen: Callable
    answer: Callable
    reconstruct: Callable
    xor_type: bool
    eps: Fraction
    family: str = "custom"
    d: int | None = None

    def __post_init__(self):
        if self.k < 1 or self.n < 1 or self.t < 0 or self.a_len < 1:
            raise ValueError("invalid scheme dimensions")
        if not self.randomness:
            raise ValueError("randomness space must be nonempty")

    @property
    def weight(self) -> Fraction:
        return Fraction(1, len(self.randomness))

    def queries(self, i: int, r) -> tuple[int, ...]:
        qs = tuple(self.query_gen(i, r))
        if len(qs) != self.k:
            raise ValueError("query generator returned the wrong number of queries")
        return qs

    def answers(self, x: Sequence[int], qs: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.answer(s, x, q) for s, q in enumerate(qs))

    def descriptor(self) -> dict:
        doc = {"k": self.k, "n": self.n, "t": self.t, "a_len": self.a_len, "family": self.family}
        if self.d is not None:
            doc["d"] = self.d
        return doc

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), separators=(",", ":"))


def _xor_all(answers) -> int:
    v = 0
    for a in answers:
        v ^= a & 1
    return v


def xor2_scheme(n: int) -> PirScheme:
    """Server 0 gets a uniform subset S, server 1 gets S with i toggled; each returns the parity of x on its set."""
    if n < 1:
        raise ValueError("n must be at least 1")

    def query_gen(i, r):
        return (r, r ^ unit_vector(n, i))

    def answer(s, x, q):
        return parity(q & bits_to_int(x))

    return PirScheme(
        2, n, n, 1, tuple(range(1 << n)), query_gen, answer,
        lambda i, r, a: _xor_all(a), True, Fraction(1, 2), family="xor2",
    )


def _int_root(n: int, d: int) -> int:
    w = round(n ** (1 / d))
    for cand in (w - 1, w, w + 1):
        if cand >= 1 and cand**d == n:
            return cand
    raise ValueError(f"n = {n} is not a {d}-th power")


def cube_scheme(n: int, d: int) -> PirScheme:
    """2^d servers over the cube [w]^d; server beta toggles i_r in subset r wherever beta_r = 1."""
    if d < 1:
        raise ValueError("d must be at least 1")
    w = _int_root(n, d)
    t = d * w
    full = (1 << w) - 1

    def digits(i):
        return [(i // w ** (d - 1 - r)) % w for r in range(d)]

    def split(q):
        return [(q >> (w * (d - 1 - r))) & full for r in range(d)]

    def query_gen(i, r):
        idx = digits(i)
        out = []
        for beta in range(1 << d):
            q = 0
            for rr, S in enumerate(split(r)):
                if (beta >> (d - 1 - rr)) & 1:
                    S ^= 1 << (w - 1 - idx[rr])
                q = (q << w) | S
            out.append(q)
        return tuple(out)

    @lru_cache(maxsize=None)
    def cell_mask(q):
        # bit mask (over x, first bit most significant) of the product of the d sets
        mask = 0
        for u in range(n):
            if all((S >> (w - 1 - c)) & 1 for S, c in zip(split(q), digits(u))):
                mask |= unit_vector(n, u)
        return mask

    def answer(s, x, q):
        return parity(cell_mask(q) & bits_to_int(x))

    return PirScheme(
        1 << d, n, t, 1, tuple(range(1 << t)), query_gen, answer,
        lambda i, r, a: _xor_all(a), True, Fraction(1, 2), family="cube", d=d,
    )


def leaky_scheme(n: int) -> PirScheme:
    """Broken 2-server scheme: both servers receive e_i in the clear; server 0 answers x_i, server 1 answers 0."""

    def answer(s, x, q):
        return parity(q & bits_to_int(x)) if s == 0 else 0

    return PirScheme(
        2, n, n, 1, (0,), lambda i, r: (unit_vector(n, i),) * 2, answer,
        lambda i, r, a: _xor_all(a), True, Fraction(1, 2), family="leaky",
    )


def constant_scheme(n: int) -> PirScheme:
    """Servers always answer 0; the answers carry no information."""
    return PirScheme(
        2, n, n, 1, tuple(range(1 << n)), lambda i, r: (r, r), lambda s, x, q: 0,
        lambda i, r, a: _xor_all(a), True, Fraction(0), family="constant",
    )


def scheme_from_descriptor(doc: dict) -> PirScheme:
    fam = doc["family"]
    if fam == "xor2":
        scheme = xor2_scheme(doc["n"])
    elif fam == "cube":
        scheme = cube_scheme(doc["n"], doc["d"])
    else:
        raise ValueError(f"unknown scheme family {fam!r}")
    for key in ("k", "t", "a_len"):
        if key in doc and doc[key] != getattr(scheme, key):
            raise ValueError(f"descriptor {key} = {doc[key]} disagrees with the {fam} family")
    return scheme


# ----------------------------------------------------------------------------
# classical evaluation


@dataclass(frozen=True)
class PrivacyReport:
    distance: float | Fraction
    per_server: tuple
    worst_pair: tuple | None
    kind: str

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "distance": str(self.distance) if isinstance(self.distance, Fraction) else self.distance,
            "per_server": [str(v) if isinstance(v, Fraction) else v for v in self.per_server],
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
        }
        return json.dumps(doc, separators=(",", ":"))


def _check_enumerable(scheme: PirScheme) -> None:
    if scheme.t > MAX_T:
        raise ValueError(f"t = {scheme.t} exceeds the enumeration cap {MAX_T}")


def classical_privacy_audit(scheme: PirScheme) -> PrivacyReport:
    """Exact max total variation distance between any server's query distributions for two indices."""
    _check_enumerable(scheme)
    w = scheme.weight
    dists = []
    for i in range(scheme.n):
        per = [Counter() for _ in range(scheme.k)]
        for r in scheme.randomness:
            for s, q in enumerate(scheme.queries(i, r)):
                per[s][q] += w
        dists.append(per)
    per_server = []
    worst, worst_pair = Fraction(0), None
    for s in range(scheme.k):
        top = Fraction(0)
        for i1, i2 in combinations(range(scheme.n), 2):
            a, b = dists[i1][s], dists[i2][s]
            tv = sum((abs(a.get(q, 0) - b.get(q, 0)) for q in set(a) | set(b)), Fraction(0)) / 2
            if tv > top:
                top = tv
            if tv > worst:
                worst, worst_pair = tv, (s, i1, i2)
        per_server.append(top)
    return PrivacyReport(worst, tuple(per_server), worst_pair, "classical")


def evaluate_pir(scheme: PirScheme, x: Sequence[int], i: int) -> Fraction:
    """Exact Pr[reconstructed bit = x_i] over the scheme's randomness."""
    _check_enumerable(scheme)
    total = Fraction(0)
    for r in scheme.randomness:
        p1 = Fraction(scheme.reconstruct(i, r, scheme.answers(x, scheme.queries(i, r))))
        total += p1 if x[i] else 1 - p1
    return total * scheme.weight


def transcript_csv(scheme: PirScheme, x: Sequence[int], i: int) -> str:
    """Queries and answers for every randomness value."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", *[f"q{s}" for s in range(scheme.k)], *[f"a{s}" for s in range(scheme.k)], "pr_output_1"])
    width = max(1, -(-scheme.t // 4))
    for r in scheme.randomness:
        qs = scheme.queries(i, r)
        ans = scheme.answers(x, qs)
        w.writerow([r, *[format(q, f"0{width}x") for q in qs], *ans, str(Fraction(scheme.reconstruct(i, r, ans)))])
    return buf.getvalue()


# ----------------------------------------------------------------------------
# quantum reductions


GENERIC = "generic"
XOR = "xor"


@dataclass(frozen=True, eq=False)
class QuantumPirProtocol:
    """Quantum servers each holding a group of the classical servers.

    For each quantum server the user prepares, per randomness value r,
    sum_b beta_b |b>_copy |b, q_b(r)>_sent over the group's branches b; the
    copy register stays with the user.  The generic path adds a dummy branch
    |0, 0^t> that no server touches and is completed with the one-query
    gadget; the xor path uses two equal branches and the XOR gadget.
    """

    scheme: PirScheme
    path: str
    groups: tuple  # per quantum server, the classical server indices in branch order

    @property
    def servers(self) -> int:
        return len(self.groups)

    @property
    def branch_count(self) -> int:
        return 3 if self.path == GENERIC else 2

    @property
    def message_dim(self) -> int:
        return self.branch_count * (1 << self.scheme.t)

    def branches(self, group: int, i: int, r) -> list[tuple[int, int, int | None]]:
        """(branch label, query, classical server or None) for the sent register."""
        qs = self.scheme.queries(i, r)
        out = []
        if self.path == GENERIC:
            out.append((0, 0, None))
        for b, s in enumerate(self.groups[group], start=1):
            out.append((b, qs[s], s))
        return out

    def sent_index(self, b: int, q: int) -> int:
        slot = b if self.path == GENERIC else b - 1
        return slot * (1 << self.scheme.t) + q


def _require_bit_answers(scheme: PirScheme) -> None:
    if scheme.a_len != 1:
        raise ValueError("quantum reductions need 1-bit answers")
    _check_enumerable(scheme)


def reduce_2server_to_1quantum(scheme: PirScheme, path: str = GENERIC) -> QuantumPirProtocol:
    if scheme.k != 2:
        raise ValueError("need a 2-server scheme")
    _require_bit_answers(scheme)
    if path not in (GENERIC, XOR):
        raise ValueError(f"unknown path {path!r}")
    if path == XOR and not scheme.xor_type:
        raise ValueError("the xor path needs an XOR-type scheme")
    return QuantumPirProtocol(scheme, path, ((0, 1),))


def reduce_2k_to_k_quantum(scheme: PirScheme) -> QuantumPirProtocol:
    """Pair classical servers (0,1), (2,3), ...; each pair becomes one quantum server."""
    if scheme.k % 2:
        raise ValueError("need an even number of servers")
    if not scheme.xor_type:
        raise ValueError("need an XOR-type scheme")
    _require_bit_answers(scheme)
    groups = tuple((s, s + 1) for s in range(0, scheme.k, 2))
    return QuantumPirProtocol(scheme, XOR, groups)


def _reconstruct_table(scheme: PirScheme, i: int, r) -> tuple[int, ...]:
    table = []
    for a1 in (0, 1):
        for a2 in (0, 1):
            v = Fraction(scheme.reconstruct(i, r, (a1, a2)))
            if v not in (0, 1):
                raise ValueError("the generic path needs a deterministic reconstruction")
            table.append(int(v))
    return tuple(table)


def evaluate_quantum_pir(protocol: QuantumPirProtocol, x: Sequence[int], i: int) -> Fraction:
    """Exact recovery probability, using the gadget outcome tables."""
    scheme = protocol.scheme
    total = Fraction(0)
    for r in scheme.randomness:
        qs = scheme.queries(i, r)
        ans = scheme.answers(x, qs)
        if protocol.path == GENERIC:
            p1 = run_gadget(_reconstruct_table(scheme, i, r), ans)[1]
        else:
            p1 = Fraction(0)
            for g in protocol.groups:
                q0, q1 = xor_gadget_distribution(ans[g[0]], ans[g[1]])
                p1 = p1 * q0 + (1 - p1) * q1
        total += p1 if x[i] else 1 - p1
    return total * scheme.weight


_GADGET_VECTORS = [s.to_quantum_state().amplitudes for s in gadget_basis()]
_XOR_VECTORS = [s.to_quantum_state().amplitudes for s in XOR_BASIS]
# gadget local labels of the branches: dummy, first server, second server
_GADGET_SLOT = (GADGET_LABELS.index((0, 1)), GADGET_LABELS.index((1, 1)), GADGET_LABELS.index((1, 2)))


def _complete(local: np.ndarray, path: str, table) -> float:
    """Pr[output 1] after the user has uncomputed the sent register, leaving ``local`` over branches."""
    if path == GENERIC:
        v = np.zeros(4, dtype=complex)
        v[list(_GADGET_SLOT)] = local
        post = gadget_postprocess(table)
        return float(sum(abs(np.vdot(b, v)) ** 2 * float(w) for b, w in zip(_GADGET_VECTORS, post)))
    return float(abs(np.vdot(_XOR_VECTORS[1], local)) ** 2)


def _server_vector(protocol: QuantumPirProtocol, group: int, x, i: int, r) -> np.ndarray:
    """Copy (x) sent register state after the server's phase action, as a (branches, message_dim) array."""
    nb = protocol.branch_count
    psi = np.zeros((nb, protocol.message_dim), dtype=complex)
    amp = 1 / math.sqrt(nb)
    for pos, (b, q, s) in enumerate(protocol.branches(group, i, r)):
        phase = 1.0 if s is None else (-1.0) ** protocol.scheme.answer(s, x, q)
        psi[pos, protocol.sent_index(b, q)] = amp * phase
    return psi


def simulate_quantum_pir(protocol: QuantumPirProtocol, x: Sequence[int], i: int) -> float:
    """State-vector simulation of the protocol; agrees with :func:`evaluate_quantum_pir`."""
    scheme = protocol.scheme
    total = 0.0
    for r in scheme.randomness:
        p1 = 0.0
        for g in range(protocol.servers):
            psi = _server_vector(protocol, g, x, i, r)
            # uncompute |b, q_b> -> |0> using r and the copy
            local = np.array([psi[pos, protocol.sent_index(b, q)] for pos, (b, q, _) in enumerate(protocol.branches(g, i, r))])
            if abs(np.linalg.norm(psi) - np.linalg.norm(local)) > 1e-12:
                raise AssertionError("server action left the query subspace")
            table = _reconstruct_table(scheme, i, r) if protocol.path == GENERIC else None
            pg = _complete(local, protocol.path, table)
            p1 = pg if g == 0 else p1 * (1 - pg) + (1 - p1) * pg
        total += p1 if x[i] else 1 - p1
    return total / len(scheme.randomness)


def server_density(protocol: QuantumPirProtocol, group: int, x: Sequence[int], i: int) -> np.ndarray:
    """Reduced state of one quantum server's sent register.

    The purification sum_r sqrt(p_r)|r>|copy, sent> is written as a matrix
    with rows (r, copy) and columns sent; the partial trace over the rows is
    Phi^T Phi*.
    """
    scheme = protocol.scheme
    rows = [_server_vector(protocol, group, x, i, r) for r in scheme.randomness]
    phi = np.concatenate(rows, axis=0) / math.sqrt(len(rows))
    return phi.T @ phi.conj()


def quantum_privacy_audit(protocol: QuantumPirProtocol, xs=None) -> PrivacyReport:
    """Max trace distance between a server's reduced states for two indices, over the given databases."""
    scheme = protocol.scheme
    if xs is None:
        xs = list(all_messages(scheme.n)) if scheme.n <= 4 else [tuple([0] * scheme.n), tuple([1] * scheme.n)]
    worst, worst_pair, per_server = 0.0, None, []
    for g in range(protocol.servers):
        top = 0.0
        for x in xs:
            rhos = [server_density(protocol, g, x, i) for i in range(scheme.n)]
            for i1, i2 in combinations(range(scheme.n), 2):
                dist = trace_distance(rhos[i1], rhos[i2])
                top = max(top, dist)
                if dist > worst:
                    worst, worst_pair = dist, (g, i1, i2)
        per_server.append(top)
    return PrivacyReport(worst, tuple(per_server), worst_pair, "quantum")


# ----------------------------------------------------------------------------
# extraction of a random access code


@dataclass(frozen=True, eq=False)
class PirRac:
    """|psi_x> = sum_b lambda_b s_bx |b> over B = {(0,0)} u {1,2} x {0,1}^t (no dummy on the xor path)."""

    protocol: QuantumPirProtocol
    basis: tuple
    lam: np.ndarray
    lam_spread: float
    recovery: dict
    protocol_recovery: dict
    ledger: EntropyLedger | None

    def phases(self, x: Sequence[int]) -> np.ndarray:
        scheme = self.protocol.scheme
        return np.array([1.0 if b == 0 else (-1.0) ** scheme.answer(b - 1, x, q) for b, q in self.basis])

    def state(self, x: Sequence[int]) -> QuantumState:
        return QuantumState(self.lam * self.phases(x), labels=self.basis)

    @property
    def qubits(self) -> int:
        return self.protocol.scheme.t + 2

    @property
    def max_recovery_gap(self) -> float:
        return max(abs(self.recovery[k] - float(self.protocol_recovery[k])) for k in self.recovery)


def _branch_weights(protocol: QuantumPirProtocol, basis_index: dict, i: int) -> np.ndarray:
    """Per randomness value and basis element, the squared amplitude sqrt(p_r) beta_b contributes."""
    scheme = protocol.scheme
    W = np.zeros((len(scheme.randomness), len(basis_index)))
    p = 1.0 / (len(scheme.randomness) * protocol.branch_count)
    for ri, r in enumerate(scheme.randomness):
        for b, q, _ in protocol.branches(0, i, r):
            W[ri, basis_index[(b, q)]] += p
    return W


def pir_to_rac(scheme: PirScheme, path: str = GENERIC, audit: bool = True, tol: float = 1e-10) -> PirRac:
    """Encode x as |psi_x> and recover each x_i by the isometry |b> -> |a_ib>|b> followed by the protocol's completion."""
    protocol = reduce_2server_to_1quantum(scheme, path)
    T = 1 << scheme.t
    basis = ([(0, 0)] if path == GENERIC else []) + [(b, q) for b in (1, 2) for q in range(T)]
    index = {lbl: z for z, lbl in enumerate(basis)}
    weights = [_branch_weights(protocol, index, i) for i in range(scheme.n)]
    lam_sq = [w.sum(axis=0) for w in weights]
    spread = max(float(np.max(np.abs(l - lam_sq[0]))) for l in lam_sq)
    if spread > tol:
        raise ValueError(f"lambda depends on i (spread {spread:.3g}); the scheme is not private")
    lam = np.sqrt(lam_sq[0])
    rac = PirRac(protocol, tuple(basis), lam, spread, {}, {}, None)

    for i in range(scheme.n):
        W = weights[i]
        # |a_ib> = sum_r sqrt(W[r, b]) / lambda_b |r> (the branch copy is fixed by b)
        with np.errstate(divide="ignore", invalid="ignore"):
            A = np.where(lam > 0, np.sqrt(W) / np.where(lam > 0, lam, 1), 0.0)
        tables = [_reconstruct_table(scheme, i, r) if path == GENERIC else None for r in scheme.randomness]
        for x in all_messages(scheme.n):
            psi = rac.state(x).amplitudes
            joint = A * psi[None, :]  # rows r, columns b
            p1 = 0.0
            for ri, r in enumerate(scheme.randomness):
                row = joint[ri]
                mass = float(np.vdot(row, row).real)
                if mass == 0:
                    continue
                local = np.array([row[index[(b, q)]] for b, q, _ in protocol.branches(0, i, r)])
                p1 += mass * _complete(local / math.sqrt(mass), path, tables[ri])
            rac.recovery[(x, i)] = p1 if x[i] else 1 - p1
            rac.protocol_recovery[(x, i)] = evaluate_quantum_pir(protocol, x, i)

    ledger = None
    if audit:
        dim = 1 << rac.qubits
        encoding = [pad_state(rac.state(x), dim) for x in all_messages(scheme.n)]
        p_worst = [min(rac.recovery[(x, i)] for x in all_messages(scheme.n)) for i in range(scheme.n)]
        ledger = nayak_audit(encoding, p_worst)
    return PirRac(protocol, tuple(basis), lam, spread, rac.recovery, rac.protocol_recovery, ledger)


def pir_to_smooth(scheme: PirScheme) -> tuple[AlphabetCode, TwoQueryDecoder, SmoothReport]:
    """Codeword = both servers' answer tables over all 2^t queries; the decoder replays the user."""
    if scheme.k != 2:
        raise ValueError("need a 2-server scheme")
    _check_enumerable(scheme)
    T = 1 << scheme.t
    ell = scheme.a_len

    def enc(x):
        return tuple(scheme.answer(s, x, q) for s in (0, 1) for q in range(T))

    code = AlphabetCode(scheme.n, 2 * T, ell, enc, name=f"{scheme.family}-answers")
    plans = {}
    for i in range(scheme.n):
        grouped = defaultdict(Fraction)
        for r in scheme.randomness:
            q1, q2 = scheme.queries(i, r)
            f = []
            for a in range(1 << ell):
                for b in range(1 << ell):
                    v = Fraction(scheme.reconstruct(i, r, (a, b)))
                    if v not in (0, 1):
                        raise ValueError("randomized reconstruction is not supported")
                    f.append(int(v))
            grouped[(q1, T + q2, tuple(f))] += scheme.weight
        plans[i] = tuple(Plan(w, j, k, f) for (j, k, f), w in sorted(grouped.items()))
    decoder = TwoQueryDecoder(scheme.n, 2 * T, plans, ell=ell)
    return code, decoder, audit_smoothness(decoder)
