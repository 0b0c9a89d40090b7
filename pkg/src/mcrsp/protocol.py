"""Objects of the remote-preparation protocol.

This module builds everything the five protocol steps consume: the four-qubit
cluster-type target family, the two GHZ-class channels with their controller
qubits, the sender's projective basis and phase-correction unitaries, the
receiver's Pauli-correction vocabulary, and the ancilla-coupled triplet
unitaries that trade success probability for an exact copy of the target.

Conventions: amplitudes are real and channel coefficients satisfy
|a0| >= |a1| and |b0| >= |b1|; the sender holds A1..A4, the receiver holds
B1..B4 plus the ancilla B_A, and the controllers hold C1..Cn and D1..Dm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .statevec import StateVector, tensor

__all__ = [
    "NORM_TOL",
    "SQRT_HALF",
    "SUCCESS_FIDELITY",
    "PAULI_OPS",
    "LAYER_OPS",
    "BOB_QUBITS",
    "ANCILLA",
    "TargetState",
    "ChannelPair",
    "OutcomeKey",
    "PauliLayer",
    "CLUSTER_TARGET",
    "all_outcome_keys",
    "build_target",
    "build_cluster_state",
    "build_channels",
    "channel_labels",
    "alice_basis",
    "alice_correction",
    "triplet_unitary",
    "parity",
    "load_layer_file",
    "published_layers",
    "published_correction",
]

NORM_TOL = 1e-9
SQRT_HALF = 1.0 / math.sqrt(2.0)

# A branch counts as a success when the receiver's residual matches the
# target at least this closely; exact branches sit at 1 up to roundoff.
SUCCESS_FIDELITY = 1.0 - 1e-9

BOB_QUBITS = ("B1", "B2", "B3", "B4")
ANCILLA = "B_A"

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# "XZ" means apply X first and then Z; the opposite order differs only by a
# global phase, which no fidelity in this package can see.
PAULI_OPS = {
    "I": np.eye(2, dtype=complex),
    "X": _X,
    "Z": _Z,
    "XZ": _Z @ _X,
}
LAYER_OPS = ("I", "X", "Z", "XZ")


@dataclass(frozen=True)
class TargetState:
    """Seven real parameters of the cluster-type target family.

    The target is alpha|0000> + beta e^{i phi0}|0011> + gamma e^{i phi1}|1100>
    + delta e^{i phi2}|1111> with alpha^2+beta^2+gamma^2+delta^2 = 1.  Phases
    are expected in [0, 2 pi] but any finite real value is accepted.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    phi0: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.delta,
                self.phi0, self.phi1, self.phi2)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("TargetState parameters must be finite")
        norm = self.alpha ** 2 + self.beta ** 2 + self.gamma ** 2 + self.delta ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(
                "amplitude normalization alpha^2+beta^2+gamma^2+delta^2 = 1 "
                f"violated (got {norm:.12g})")

    @classmethod
    def normalized(cls, alpha, beta, gamma, delta, phi0=0.0, phi1=0.0, phi2=0.0):
        """Construct after rescaling the four amplitudes to unit norm."""
        s = math.sqrt(alpha ** 2 + beta ** 2 + gamma ** 2 + delta ** 2)
        if s == 0.0:
            raise ValueError("all four amplitudes are zero")
        return cls(alpha / s, beta / s, gamma / s, delta / s, phi0, phi1, phi2)

    def coefficients(self) -> np.ndarray:
        """Amplitudes (t00, t01, t10, t11) on |0000>, |0011>, |1100>, |1111>."""
        return np.array([
            self.alpha,
            self.beta * np.exp(1j * self.phi0),
            self.gamma * np.exp(1j * self.phi1),
            self.delta * np.exp(1j * self.phi2),
        ])


CLUSTER_TARGET = TargetState(0.5, 0.5, 0.5, 0.5, 0.0, 0.0, math.pi)


@dataclass(frozen=True)
class ChannelPair:
    """Real coefficients of the two GHZ-class channels plus controller counts.

    Channel 1 is a0|0...0> + a1|1...1> over (A1, A2, B1, B2, C1..Cn) and
    channel 2 is b0|0...0> + b1|1...1> over (A3, A4, B3, B4, D1..Dm).
    """

    a0: float
    a1: float
    b0: float
    b1: float
    n: int = 1
    m: int = 1

    def __post_init__(self):
        for name in ("a0", "a1", "b0", "b1"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValueError(f"channel coefficient {name} must be a finite real")
        for name in ("n", "m"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"controller count {name} must be an integer >= 0")
        na = self.a0 ** 2 + self.a1 ** 2
        nb = self.b0 ** 2 + self.b1 ** 2
        if abs(na - 1.0) > NORM_TOL:
            raise ValueError(f"channel normalization a0^2+a1^2 = 1 violated (got {na:.12g})")
        if abs(nb - 1.0) > NORM_TOL:
            raise ValueError(f"channel normalization b0^2+b1^2 = 1 violated (got {nb:.12g})")
        if abs(self.a0) < abs(self.a1):
            raise ValueError(
                f"channel bound |a0| >= |a1| violated (a0={self.a0:.12g}, a1={self.a1:.12g})")
        if abs(self.b0) < abs(self.b1):
            raise ValueError(
                f"channel bound |b0| >= |b1| violated (b0={self.b0:.12g}, b1={self.b1:.12g})")


@dataclass(frozen=True, order=True)
class OutcomeKey:
    """The six classical bits (i, j, p, q, g, h) that key Bob's correction."""

    i: int
    j: int
    p: int
    q: int
    g: int
    h: int

    def __post_init__(self):
        for name in ("i", "j", "p", "q", "g", "h"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"outcome bit {name} must be 0 or 1")

    def bits(self) -> str:
        return f"{self.i}{self.j}{self.p}{self.q}{self.g}{self.h}"

    @classmethod
    def from_bits(cls, s: str) -> "OutcomeKey":
        if len(s) != 6 or any(ch not in "01" for ch in s):
            raise ValueError(f"outcome key must be six 0/1 characters, got {s!r}")
        return cls(*(int(ch) for ch in s))


def all_outcome_keys() -> tuple:
    """All 64 keys in lexicographic ijpqgh order."""
    out = []
    for idx in range(64):
        out.append(OutcomeKey.from_bits(format(idx, "06b")))
    return tuple(out)


@dataclass(frozen=True)
class PauliLayer:
    """One correction operator per receiver qubit (B1, B2, B3, B4)."""

    ops: tuple

    def __post_init__(self):
        if len(self.ops) != 4 or any(op not in LAYER_OPS for op in self.ops):
            raise ValueError(
                f"layer must hold four ops from {LAYER_OPS}, got {self.ops!r}")

    def label(self) -> str:
        return ",".join(self.ops)

    @classmethod
    def from_label(cls, s: str) -> "PauliLayer":
        return cls(tuple(s.split(",")))

    def matrix(self) -> np.ndarray:
        """Dense 16x16 matrix over (B1, B2, B3, B4), B1 most significant."""
        out = PAULI_OPS[self.ops[0]]
        for op in self.ops[1:]:
            out = np.kron(out, PAULI_OPS[op])
        return out


def build_target(t: TargetState, labels=BOB_QUBITS) -> StateVector:
    """The target state as a four-qubit StateVector."""
    amps = np.zeros(16, dtype=complex)
    c = t.coefficients()
    amps[0b0000] = c[0]
    amps[0b0011] = c[1]
    amps[0b1100] = c[2]
    amps[0b1111] = c[3]
    return StateVector(labels, amps, copy=False)


def build_cluster_state(n_qubits: int) -> StateVector:
    """The N-qubit cluster state from the product formula.

    Each factor contributes |0> on qubit s together with a Z on qubit s+1,
    or |1> on qubit s alone; the trailing Z acts as identity.  For N = 2 this
    gives (|00> - |01> + |10> + |11>)/2.
    """
    if not isinstance(n_qubits, int) or not 1 <= n_qubits <= 12:
        raise ValueError(f"cluster size must be an integer in 1..12, got {n_qubits!r}")
    size = 2 ** n_qubits
    amps = np.empty(size, dtype=complex)
    for idx in range(size):
        bits = [(idx >> (n_qubits - 1 - s)) & 1 for s in range(n_qubits)]
        sign = 1
        for s in range(n_qubits - 1):
            if bits[s] == 0 and bits[s + 1] == 1:
                sign = -sign
        amps[idx] = sign
    amps /= math.sqrt(size)
    labels = tuple(f"q{k + 1}" for k in range(n_qubits))
    return StateVector(labels, amps, copy=False)


def channel_labels(c: ChannelPair) -> tuple:
    """Register order: channel 1 qubits first, then channel 2 qubits."""
    ch1 = ("A1", "A2", "B1", "B2") + tuple(f"C{k + 1}" for k in range(c.n))
    ch2 = ("A3", "A4", "B3", "B4") + tuple(f"D{k + 1}" for k in range(c.m))
    return ch1 + ch2


def build_channels(c: ChannelPair) -> StateVector:
    """Tensor product of the two GHZ-class channels."""
    ch1 = ("A1", "A2", "B1", "B2") + tuple(f"C{k + 1}" for k in range(c.n))
    ch2 = ("A3", "A4", "B3", "B4") + tuple(f"D{k + 1}" for k in range(c.m))
    amps1 = np.zeros(2 ** len(ch1), dtype=complex)
    amps1[0] = c.a0
    amps1[-1] = c.a1
    amps2 = np.zeros(2 ** len(ch2), dtype=complex)
    amps2[0] = c.b0
    amps2[-1] = c.b1
    return tensor(StateVector(ch1, amps1, copy=False),
                  StateVector(ch2, amps2, copy=False))


def alice_basis(t: TargetState) -> np.ndarray:
    """Sender's projective basis on (A1, A3) as a unitary 4x4 matrix.

    Row r = 2i+j holds the ket expansion of basis vector (i, j) over
    |00>, |01>, |10>, |11>; the rows are orthonormal for every valid target.
    """
    a, b, g, d = t.alpha, t.beta, t.gamma, t.delta
    e0 = np.exp(-1j * t.phi0)
    e1 = np.exp(-1j * t.phi1)
    e2 = np.exp(-1j * t.phi2)
    return np.array([
        [a, b * e0, g * e1, d * e2],
        [b, -a * e0, d * e1, -g * e2],
        [g, -d * e0, -a * e1, b * e2],
        [d, g * e0, -b * e1, -a * e2],
    ])


def _check_bit(name: str, v: int) -> None:
    if v not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {v!r}")


def alice_correction(i: int, j: int, t: TargetState) -> np.ndarray:
    """Sender's diagonal phase correction on (A2, A4) for outcome (i, j)."""
    _check_bit("i", i)
    _check_bit("j", j)
    p0, p1, p2 = t.phi0, t.phi1, t.phi2
    e = lambda x: np.exp(1j * x)
    if (i, j) == (0, 0):
        diag = [1.0, 1.0, 1.0, 1.0]
    elif (i, j) == (0, 1):
        diag = [e(p0), -e(-p0), e(p2 - p1), -e(p1 - p2)]
    elif (i, j) == (1, 0):
        diag = [e(p1), -e(p2 - p0), -e(-p1), e(p0 - p2)]
    else:
        diag = [e(p2), e(p1 - p0), -e(p0 - p1), -e(-p2)]
    return np.diag(np.asarray(diag, dtype=complex))


# Diagonal pattern of the W block per (i, j); entries are ratios of channel
# coefficients and the position within the block is the (B1, B3) bit pair.
_W_PATTERN = {
    (0, 0): ("ab", "a", "b", "1"),
    (0, 1): ("a", "ab", "1", "b"),
    (1, 0): ("b", "1", "ab", "a"),
    (1, 1): ("1", "b", "a", "ab"),
}


def triplet_unitary(i: int, j: int, c: ChannelPair) -> np.ndarray:
    """Receiver's collective unitary on (ancilla, B1, B3) for outcome (i, j).

    Returned as an 8x8 block matrix [[W, U], [U, -W]] where the block index
    is the ancilla bit, i.e. basis index = 4*b_A + 2*b_B1 + b_B3.  Apply it
    with targets (B_A, B1, B3).  Capturing the ancilla in |0> rescales every
    surviving component to the common weight a1*b1.
    """
    _check_bit("i", i)
    _check_bit("j", j)
    ra = c.a1 / c.a0
    rb = c.b1 / c.b0
    vals = {"ab": ra * rb, "a": ra, "b": rb, "1": 1.0}
    w = np.array([vals[k] for k in _W_PATTERN[(i, j)]], dtype=float)
    u = np.sqrt(np.maximum(0.0, 1.0 - w * w))
    out = np.zeros((8, 8), dtype=complex)
    out[:4, :4] = np.diag(w)
    out[:4, 4:] = np.diag(u)
    out[4:, :4] = np.diag(u)
    out[4:, 4:] = -np.diag(w)
    return out


def parity(bits) -> int:
    """XOR of a bit sequence; empty input gives 0."""
    acc = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"parity input must be 0/1 bits, got {b!r}")
        acc ^= b
    return acc


def load_layer_file(path) -> dict:
    """Parse a 64-line correction table: 'ijpqgh opB1,opB2,opB3,opB4'."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) != 64:
        raise ValueError(f"correction table must have 64 rows, got {len(lines)}")
    table = {}
    for ln in lines:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"malformed table row {ln!r}")
        key = OutcomeKey.from_bits(parts[0])
        if key in table:
            raise ValueError(f"duplicate key {parts[0]} in correction table")
        table[key] = PauliLayer.from_label(parts[1])
    return table


_PUBLISHED_RESOURCE = "published_corrections.txt"


@lru_cache(maxsize=1)
def _published_default() -> dict:
    ref = resources.files(__package__).joinpath("data", _PUBLISHED_RESOURCE)
    with resources.as_file(ref) as path:
        return load_layer_file(path)


def published_layers(path=None) -> dict:
    """The correction table as printed in the published protocol description.

    The table is shipped verbatim, including its internally inconsistent
    rows; use the oracle module to audit it against a derived table.
    """
    if path is not None:
        return load_layer_file(path)
    return dict(_published_default())


def published_correction(key: OutcomeKey, path=None) -> PauliLayer:
    """One row of the published correction table."""
    if path is not None:
        table = load_layer_file(path)
    else:
        table = _published_default()
    return table[key]
