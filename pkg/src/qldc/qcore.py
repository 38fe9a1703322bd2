"""Finite-dimensional quantum simulation: states, density matrices, POVMs,
query oracles and entropy functionals.

Two representations live here:

* :class:`QuantumState` / :class:`DensityMatrix` are numpy-backed, double
  precision, and carry optional basis labels and a register layout.
* :class:`SurdState` is an exact real state of the form ``sqrt(scale) * v``
  with ``v`` an integer (or rational) vector.  Inner products of two such
  states square to a rational, which is how the gadget probabilities are
  certified exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Sequence

import numpy as np

NORM_TOL = 1e-12
PSD_TOL = 1e-10

__all__ = [
    "QuantumState",
    "DensityMatrix",
    "Povm",
    "OutcomeDistribution",
    "EntropyRecord",
    "SurdState",
    "basis_state",
    "tensor_product",
    "apply_phase_oracle",
    "apply_bitflip_oracle",
    "check_oracle_equivalence",
    "check_bitflip_via_phase",
    "measure_povm",
    "measure_in_basis",
    "reduced_density",
    "von_neumann_entropy",
    "entropy_relations",
    "trace_distance",
    "states_equal_up_to_phase",
    "control_index_labels",
    "state_to_json",
    "state_from_json",
    "density_to_json",
]


def _as_tuple_labels(labels):
    if labels is None:
        return None
    return tuple(tuple(l) if isinstance(l, list) else l for l in labels)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A unit vector over an indexed basis.

    ``dims`` declares a register layout (row-major, first register most
    significant); it is what :func:`reduced_density` traces over.
    """

    amplitudes: np.ndarray
    labels: tuple | None = None
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", _as_tuple_labels(self.labels))
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if amps.size == 0:
            raise ValueError("state must have positive dimension")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (squared norm {norm2!r})")
        if self.labels is not None:
            if len(self.labels) != amps.size:
                raise ValueError("label list length does not match dimension")
            if len(set(self.labels)) != amps.size:
                raise ValueError("basis labels must be distinct")
        if self.dims is not None and math.prod(self.dims) != amps.size:
            raise ValueError("register dims do not multiply to the state dimension")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def index(self, label: Hashable) -> int:
        if self.labels is None:
            raise ValueError("state has no basis labels")
        return self.labels.index(label)

    def amplitude(self, label: Hashable) -> complex:
        return complex(self.amplitudes[self.index(label)])

    def inner(self, other: "QuantumState") -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), dims=self.dims)

    def with_amplitudes(self, amplitudes) -> "QuantumState":
        return QuantumState(amplitudes, labels=self.labels, dims=self.dims)

    @classmethod
    def from_unnormalized(cls, vector, labels=None, dims=None) -> "QuantumState":
        v = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / norm, labels=labels, dims=dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    entries: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise ValueError("density matrix must be a non-empty square matrix")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
            if math.prod(self.dims) != rho.shape[0]:
                raise ValueError("register dims do not multiply to the matrix dimension")
        if np.max(np.abs(rho - rho.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators summing to the identity.

    ``kraus`` optionally holds operators ``M_i`` with ``E_i = M_i^* M_i``;
    when present, :func:`measure_povm` also returns post-measurement states.
    """

    elements: tuple
    kraus: tuple | None = None

    def __post_init__(self):
        elems = tuple(np.array(e, dtype=complex) for e in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        d = elems[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in elems:
            if e.shape != (d, d):
                raise ValueError("POVM elements must share one square shape")
            if np.max(np.abs(e - e.conj().T)) > PSD_TOL:
                raise ValueError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -PSD_TOL:
                raise ValueError("POVM element is not positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(d))) > PSD_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)
        if self.kraus is not None:
            ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
            if len(ks) != len(elems):
                raise ValueError("need one Kraus operator per POVM element")
            for k, e in zip(ks, elems):
                if np.max(np.abs(k.conj().T @ k - e)) > PSD_TOL:
                    raise ValueError("Kraus operator does not reproduce its POVM element")
            object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @classmethod
    def from_kraus(cls, kraus) -> "Povm":
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        return cls(tuple(k.conj().T @ k for k in ks), kraus=tuple(ks))

    @classmethod
    def from_basis(cls, basis: Sequence[QuantumState]) -> "Povm":
        projs = [np.outer(b.amplitudes, b.amplitudes.conj()) for b in basis]
        return cls(tuple(projs), kraus=tuple(projs))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    probabilities: np.ndarray
    post_states: tuple | None = None

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if np.any(p < -NORM_TOL) or np.any(p > 1 + NORM_TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError("probabilities do not sum to 1")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __getitem__(self, i):
        return float(self.probabilities[i])

    def __len__(self):
        return len(self.probabilities)


@dataclass(frozen=True)
class EntropyRecord:
    S_A: float
    S_B: float
    S_AB: float
    S_A_given_B: float
    S_A_B: float  # mutual information S(A:B)


def basis_state(dim: int, index: int, labels=None, dims=None) -> QuantumState:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return QuantumState(v, labels=labels, dims=dims)


def control_index_labels(m: int) -> tuple:
    """Labels (c, j) for c in {0,1}, j in 1..m, control bit major."""
    return tuple((c, j) for c in (0, 1) for j in range(1, m + 1))


def tensor_product(s1: QuantumState, s2: QuantumState) -> QuantumState:
    amps = np.kron(s1.amplitudes, s2.amplitudes)
    labels = None
    if s1.labels is not None or s2.labels is not None:
        l1 = s1.labels if s1.labels is not None else tuple(range(s1.dim))
        l2 = s2.labels if s2.labels is not None else tuple(range(s2.dim))
        labels = tuple((a, b) for a in l1 for b in l2)
    d1 = s1.dims if s1.dims is not None else (s1.dim,)
    d2 = s2.dims if s2.dims is not None else (s2.dim,)
    return QuantumState(amps, labels=labels, dims=d1 + d2)


def _bit(y: Sequence[int], j: int) -> int:
    """y_j with the 1-based index convention of (c, j) labels."""
    if not 1 <= j <= len(y):
        raise ValueError(f"index {j} is out of range for a word of length {len(y)}")
    return int(y[j - 1]) & 1


def apply_phase_oracle(s: QuantumState, y: Sequence[int]) -> QuantumState:
    """|c, j> -> (-1)^(c * y_j) |c, j>, labels (c, j) with 1-based j."""
    if s.labels is None:
        raise ValueError("phase oracle needs (c, j) labels")
    signs = np.empty(s.dim)
    for idx, (c, j) in enumerate(s.labels):
        signs[idx] = -1.0 if (c and _bit(y, j)) else 1.0
    return s.with_amplitudes(s.amplitudes * signs)


def apply_bitflip_oracle(s: QuantumState, y: Sequence[int]) -> QuantumState:
    """|j, b> -> |j, b xor y_j>, labels (j, b) with 1-based j."""
    if s.labels is None:
        raise ValueError("bit-flip oracle needs (j, b) labels")
    pos = {lab: i for i, lab in enumerate(s.labels)}
    out = np.zeros(s.dim, dtype=complex)
    for idx, (j, b) in enumerate(s.labels):
        target = (j, b ^ _bit(y, j))
        if target not in pos:
            raise ValueError(f"label {target} missing from the basis")
        out[pos[target]] += s.amplitudes[idx]
    return s.with_amplitudes(out)


def states_equal_up_to_phase(s1: QuantumState, s2: QuantumState, tol: float = NORM_TOL) -> bool:
    return s1.dim == s2.dim and abs(abs(s1.inner(s2)) - 1.0) <= tol


def check_oracle_equivalence(s: QuantumState, y: Sequence[int]) -> bool:
    """Phase query versus its simulation by one bit-flip query.

    The target qubit is prepared in |+> when c = 0 and |-> when c = 1, the
    bit-flip oracle is applied to (j, target), the preparation is undone and
    the target (now |0>) discarded.
    """
    m = len(y)
    phased = apply_phase_oracle(s, y)

    labels = tuple((j, b) for j in range(1, m + 1) for b in (0, 1))
    inv = 1.0 / math.sqrt(2.0)
    # one bit-flip workspace per control value, so the oracle acts on both
    branches = {}
    for c in (0, 1):
        v = np.zeros(2 * m, dtype=complex)
        sign = -1.0 if c else 1.0
        for idx, (cc, j) in enumerate(s.labels):
            if cc != c:
                continue
            v[2 * (j - 1)] += s.amplitudes[idx] * inv
            v[2 * (j - 1) + 1] += sign * s.amplitudes[idx] * inv
        branches[c] = v
    out = np.zeros(s.dim, dtype=complex)
    for c, v in branches.items():
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        w = apply_bitflip_oracle(QuantumState(v / norm, labels=labels), y).amplitudes * norm
        sign = -1.0 if c else 1.0
        for idx, (cc, j) in enumerate(s.labels):
            if cc == c:
                # undo the target preparation and keep the |0> component
                out[idx] = (w[2 * (j - 1)] + sign * w[2 * (j - 1) + 1]) * inv
    if abs(np.linalg.norm(out) - 1.0) > NORM_TOL:
        return False
    return states_equal_up_to_phase(phased, s.with_amplitudes(out))


def check_bitflip_via_phase(s: QuantumState, y: Sequence[int]) -> bool:
    """Bit-flip query versus its simulation by one phase query (Hadamard on the target)."""
    direct = apply_bitflip_oracle(s, y)
    m = len(y)
    clabels = tuple((c, j) for c in (0, 1) for j in range(1, m + 1))
    v = np.zeros(2 * m, dtype=complex)
    inv = 1.0 / math.sqrt(2.0)
    for idx, (j, b) in enumerate(s.labels):
        v[j - 1] += s.amplitudes[idx] * inv
        v[m + j - 1] += (-1.0) ** b * s.amplitudes[idx] * inv
    w = apply_phase_oracle(QuantumState(v, labels=clabels), y).amplitudes
    out = np.zeros(s.dim, dtype=complex)
    for idx, (j, b) in enumerate(s.labels):
        out[idx] = (w[j - 1] + (-1.0) ** b * w[m + j - 1]) * inv
    return states_equal_up_to_phase(direct, s.with_amplitudes(out))


def measure_povm(rho: DensityMatrix | QuantumState, povm: Povm) -> OutcomeDistribution:
    if isinstance(rho, QuantumState):
        rho = rho.density()
    if rho.dim != povm.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, POVM {povm.dim}")
    r = rho.entries
    probs = np.array([np.trace(e @ r).real for e in povm.elements])
    posts = None
    if povm.kraus is not None:
        posts = []
        for p, k in zip(probs, povm.kraus):
            if p > NORM_TOL:
                post = k @ r @ k.conj().T
                posts.append(DensityMatrix(post / np.trace(post).real, dims=rho.dims))
            else:
                posts.append(None)
        posts = tuple(posts)
    return OutcomeDistribution(probs, posts)


def measure_in_basis(s: QuantumState, basis: Sequence[QuantumState]) -> OutcomeDistribution:
    if len(basis) != s.dim:
        raise ValueError("basis must span the state space")
    gram = np.array([[np.vdot(a.amplitudes, b.amplitudes) for b in basis] for a in basis])
    if np.max(np.abs(gram - np.eye(len(basis)))) > PSD_TOL:
        raise ValueError("basis is not orthonormal")
    probs = np.array([abs(b.inner(s)) ** 2 for b in basis])
    posts = tuple(b.density() for b in basis)
    return OutcomeDistribution(probs, tuple(p if q > NORM_TOL else None for p, q in zip(posts, probs)))


def _partial_trace_vector(amps: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    psi = amps.reshape(dims)
    rest = tuple(a for a in range(len(dims)) if a not in keep)
    psi = np.transpose(psi, rest + keep)
    kd = math.prod(dims[a] for a in keep)
    mat = psi.reshape(-1, kd)
    return mat.T @ mat.conj()


def _partial_trace_matrix(rho: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    n = len(dims)
    t = rho.reshape(dims + dims)
    rest = [a for a in range(n) if a not in keep]
    # contract each traced register's row index with its column index
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for a in rest:
        cols[a] = rows[a]
    out = "".join(rows[a] for a in keep) + "".join(cols[a] for a in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    kd = math.prod(dims[a] for a in keep)
    return res.reshape(kd, kd)


def reduced_density(s: QuantumState | DensityMatrix, keep) -> DensityMatrix:
    """Partial trace onto the registers listed in ``keep`` (an int or a sequence)."""
    if s.dims is None or len(s.dims) < 2:
        raise ValueError("no register bipartition declared")
    keep = (keep,) if isinstance(keep, int) else tuple(keep)
    if not keep or any(not 0 <= k < len(s.dims) for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid register selection {keep}")
    keep = tuple(sorted(keep))
    if isinstance(s, QuantumState):
        red = _partial_trace_vector(s.amplitudes, s.dims, keep)
    else:
        red = _partial_trace_matrix(s.entries, s.dims, keep)
    red = (red + red.conj().T) / 2
    kept_dims = tuple(s.dims[k] for k in keep)
    return DensityMatrix(red, dims=kept_dims if len(kept_dims) > 1 else None)


def von_neumann_entropy(rho: DensityMatrix | QuantumState) -> float:
    """-Tr(rho log2 rho) in bits; eigenvalues in [-1e-10, 0) count as zero."""
    if isinstance(rho, QuantumState):
        return 0.0
    lam = rho.eigenvalues()
    if lam.min() < -PSD_TOL:
        raise ValueError("negative eigenvalue below tolerance")
    lam = lam[lam > 0]
    s = float(-np.sum(lam * np.log2(lam)))
    return min(max(s, 0.0), math.log2(rho.dim))


def entropy_relations(joint: DensityMatrix | QuantumState) -> EntropyRecord:
    if joint.dims is None or len(joint.dims) != 2:
        raise ValueError("joint state needs a declared bipartition (two registers)")
    if isinstance(joint, QuantumState):
        joint = joint.density()
    s_ab = von_neumann_entropy(joint)
    s_a = von_neumann_entropy(reduced_density(joint, 0))
    s_b = von_neumann_entropy(reduced_density(joint, 1))
    return EntropyRecord(s_a, s_b, s_ab, s_ab - s_b, s_a + s_b - s_ab)


def trace_distance(rho: DensityMatrix | np.ndarray, sigma: DensityMatrix | np.ndarray) -> float:
    a = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    b = sigma.entries if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a - b))))


# ----------------------------------------------------------------------------
# exact states


@dataclass(frozen=True)
class SurdState:
    """Exact real state ``sqrt(scale) * coeffs`` over labelled basis vectors."""

    scale: Fraction
    coeffs: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.labels and len(self.labels) != len(self.coeffs):
            raise ValueError("label list length does not match dimension")

    def norm_squared(self) -> Fraction:
        return self.scale * sum(Fraction(c) * c for c in self.coeffs)

    def overlap_squared(self, other: "SurdState") -> Fraction:
        """|<self|other>|^2 as an exact rational."""
        if len(other.coeffs) != len(self.coeffs):
            raise ValueError("dimension mismatch")
        dot = sum(a * b for a, b in zip(self.coeffs, other.coeffs))
        return self.scale * other.scale * dot * dot

    def with_signs(self, signs: Sequence[int]) -> "SurdState":
        return SurdState(self.scale, tuple(c * s for c, s in zip(self.coeffs, signs)), self.labels)

    def amplitude_squared(self, index: int) -> Fraction:
        c = self.coeffs[index]
        return self.scale * c * c

    def to_quantum_state(self) -> QuantumState:
        amps = math.sqrt(self.scale) * np.array([float(c) for c in self.coeffs])
        return QuantumState(amps, labels=self.labels or None)


# ----------------------------------------------------------------------------
# JSON


def _jsonable_label(label: Any):
    if isinstance(label, tuple):
        return [_jsonable_label(x) for x in label]
    return label


def state_to_json(s: QuantumState) -> str:
    doc = {
        "dim": s.dim,
        "amplitudes": [[float(a.real), float(a.imag)] for a in s.amplitudes],
        "labels": None if s.labels is None else [_jsonable_label(l) for l in s.labels],
        "dims": None if s.dims is None else list(s.dims),
    }
    return json.dumps(doc, separators=(",", ":"))


def _tuplify(label):
    if isinstance(label, list):
        return tuple(_tuplify(x) for x in label)
    return label


def state_from_json(text: str) -> QuantumState:
    doc = json.loads(text)
    amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
    if amps.size != doc["dim"]:
        raise ValueError("dim field disagrees with amplitude count")
    labels = None if doc.get("labels") is None else [_tuplify(l) for l in doc["labels"]]
    return QuantumState(amps, labels=labels, dims=doc.get("dims"))


def density_to_json(rho: DensityMatrix) -> str:
    doc = {
        "dim": rho.dim,
        "entries": [[float(z.real), float(z.imag)] for z in rho.entries.reshape(-1)],
        "dims": None if rho.dims is None else list(rho.dims),
    }
    return json.dumps(doc, separators=(",", ":"))
