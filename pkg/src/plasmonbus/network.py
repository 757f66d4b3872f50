"""Ideal state-vector layer: EPR pairs and the nonlocal CNOT protocol.

Qubit 0 is the most significant bit of the amplitude index; |0> = |down>,
|1> = |up>.  The shared pair is the singlet (|01> - |10>)/sqrt(2).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvariantError

MAX_QUBITS = 12
NORM_TOL = 1e-12
EPR_TOL = 1e-9

_S2 = 1.0 / math.sqrt(2.0)
SINGLET = np.array([0.0, _S2, -_S2, 0.0], dtype=complex)

_ONE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
}


def gate_matrix(name, theta=None):
    """Unitary for a named gate; two-qubit gates act on (control, target)."""
    name = name.upper()
    if name in _ONE_QUBIT:
        return _ONE_QUBIT[name]
    if name == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if name == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "CPHASE":
        if theta is None:
            raise DomainError("CPHASE needs theta")
        return np.diag([1, 1, 1, np.exp(1j * theta)])
    raise DomainError(f"unknown gate {name!r}")


@dataclass
class QubitRegister:
    n: int
    amplitudes: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise DomainError(f"register size must be in [1, {MAX_QUBITS}], got {self.n}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != 2**self.n:
            raise DomainError(f"expected {2**self.n} amplitudes, got {self.amplitudes.size}")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantError(f"register norm {norm!r} differs from 1")
        if self.labels is None:
            self.labels = tuple(f"q{k}" for k in range(self.n))
        self.labels = tuple(self.labels)
        if len(self.labels) != self.n:
            raise DomainError("one label per qubit required")

    @classmethod
    def zeros(cls, n, labels=None):
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps, labels)

    @classmethod
    def from_qubits(cls, states, labels=None):
        """Product state from a list of single-qubit vectors."""
        amps = np.array([1.0 + 0j])
        for s in states:
            s = np.asarray(s, dtype=complex)
            amps = np.kron(amps, s / np.linalg.norm(s))
        return cls(len(states), amps, labels)

    def index_of(self, q):
        if isinstance(q, str):
            if q not in self.labels:
                raise DomainError(f"no qubit labelled {q!r}")
            return self.labels.index(q)
        if not 0 <= q < self.n:
            raise DomainError(f"qubit index {q} out of range")
        return int(q)

    def tensor(self):
        return self.amplitudes.reshape((2,) * self.n)

    def with_amplitudes(self, amps):
        return QubitRegister(self.n, amps, self.labels)

    def probability_one(self, q):
        q = self.index_of(q)
        t = np.moveaxis(self.tensor(), q, 0)
        return float(np.sum(np.abs(t[1]) ** 2))


def _targets(reg, targets):
    idx = [reg.index_of(t) for t in targets]
    if len(set(idx)) != len(idx):
        raise DomainError(f"targets must be distinct, got {targets}")
    return idx


def apply_unitary(reg, u, targets):
    idx = _targets(reg, targets)
    k = len(idx)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2**k, 2**k):
        raise DomainError(f"unitary shape {u.shape} does not match {k} targets")
    t = np.moveaxis(reg.tensor(), idx, list(range(k)))
    shape = t.shape
    t = (u @ t.reshape(2**k, -1)).reshape(shape)
    t = np.moveaxis(t, list(range(k)), idx)
    return reg.with_amplitudes(t.reshape(-1))


def apply_gate(reg, gate, targets, theta=None):
    """Apply a named gate (X, Y, Z, H, S, CNOT, CZ, CPHASE) to ``targets``."""
    u = gate_matrix(gate, theta)
    return apply_unitary(reg, u, targets)


def reduced_density(reg, qubits):
    idx = _targets(reg, qubits)
    k = len(idx)
    t = np.moveaxis(reg.tensor(), idx, list(range(k))).reshape(2**k, -1)
    return t @ t.conj().T


def project(reg, qubits, state):
    """<state|_qubits |reg>: unnormalized vector on the remaining qubits (in order)."""
    idx = _targets(reg, qubits)
    k = len(idx)
    t = np.moveaxis(reg.tensor(), idx, list(range(k))).reshape(2**k, -1)
    return np.asarray(state, dtype=complex).conj() @ t


def prepare_epr(reg, q1, q2):
    """Put two |0> qubits into the singlet (|01> - |10>)/sqrt(2)."""
    a, b = _targets(reg, (q1, q2))
    if reg.probability_one(a) > NORM_TOL or reg.probability_one(b) > NORM_TOL:
        raise DomainError("EPR qubits must start in |down>")
    reg = apply_gate(reg, "X", [b])
    reg = apply_gate(reg, "H", [a])
    reg = apply_gate(reg, "CNOT", [a, b])
    return apply_gate(reg, "Z", [a])


def epr_fidelity(reg, q1, q2):
    """<singlet| rho_(q1,q2) |singlet>."""
    rho = reduced_density(reg, (q1, q2))
    return float(np.real(SINGLET.conj() @ rho @ SINGLET))


def measure(reg, q, basis, rng, forced=None):
    """Projective measurement; returns (post-measurement register, bit).

    An X-basis measurement is H followed by a Z measurement, so the qubit is
    left in the computational state |bit>.
    """
    q = reg.index_of(q)
    if basis == "X":
        reg = apply_gate(reg, "H", [q])
    elif basis != "Z":
        raise DomainError(f"basis must be 'Z' or 'X', got {basis!r}")
    p1 = reg.probability_one(q)
    if forced is None:
        bit = int(rng.random() < p1)
    else:
        bit = int(forced)
        if bit not in (0, 1):
            raise DomainError("forced outcomes must be 0 or 1")
    p = p1 if bit else 1.0 - p1
    if p < 1e-12:
        raise DomainError(f"forced outcome {bit} on qubit {q} has probability {p:.2e}")
    t = np.moveaxis(reg.tensor(), q, 0).copy()
    t[1 - bit] = 0.0
    t = np.moveaxis(t, 0, q).reshape(-1) / math.sqrt(p)
    return reg.with_amplitudes(t), bit


@dataclass
class ProtocolTranscript:
    operations: list = field(default_factory=list)  # {"gate", "targets"}
    measurements: list = field(default_factory=list)  # {"qubit", "basis", "result", "probability"}
    corrections: list = field(default_factory=list)  # {"gate", "targets", "condition", "applied"}
    verification: dict = field(default_factory=dict)

    @property
    def bits(self):
        return tuple(m["result"] for m in self.measurements)

    @property
    def two_qubit_gates(self):
        return sum(1 for op in self.operations if op["gate"] in ("CNOT", "CZ", "CPHASE"))

    def to_dict(self):
        return {
            "operations": self.operations,
            "measurements": self.measurements,
            "corrections": self.corrections,
            "verification": self.verification,
        }


def _align_phase(v, ref):
    ov = np.vdot(ref, v)
    if abs(ov) == 0:
        return v
    return v * (abs(ov) / ov)


def nonlocal_cnot(reg, control_A, target_B, transceiver_i, transceiver_j,
                  rng=None, seed=None, forced=None):
    """CNOT(A -> B) through the singlet on (i, j) with two measurements.

    Sequence: CNOT(A -> i); measure i in Z (m1); X on j if m1 = 0;
    CNOT(j -> B); measure j in X (m2); Z on A if m2 = 0.  ``forced`` fixes
    (m1, m2).  The returned register keeps the measured transceivers in
    |m1>, |m2>.  The transcript's ``verification`` compares the (A, B, ...)
    state with a direct CNOT up to global phase.
    """
    A, B, ti, tj = _targets(reg, (control_A, target_B, transceiver_i, transceiver_j))
    f_epr = epr_fidelity(reg, ti, tj)
    if f_epr < 1.0 - EPR_TOL:
        raise InvariantError(f"transceivers are not in the singlet (overlap {f_epr:.12f})")
    if rng is None:
        rng = np.random.default_rng(seed)
    forced = (None, None) if forced is None else tuple(forced)
    tr = ProtocolTranscript()

    rest_in = project(reg, (ti, tj), SINGLET)
    out = apply_gate(reg, "CNOT", [A, ti])
    tr.operations.append({"gate": "CNOT", "targets": [reg.labels[A], reg.labels[ti]]})
    p_one = out.probability_one(ti)
    out, m1 = measure(out, ti, "Z", rng, forced[0])
    tr.measurements.append({"qubit": reg.labels[ti], "basis": "Z", "result": m1,
                            "probability": p_one if m1 else 1 - p_one})
    if m1 == 0:
        out = apply_gate(out, "X", [tj])
    tr.corrections.append({"gate": "X", "targets": [reg.labels[tj]], "condition": "m1 == 0",
                           "applied": m1 == 0})
    out = apply_gate(out, "CNOT", [tj, B])
    tr.operations.append({"gate": "CNOT", "targets": [reg.labels[tj], reg.labels[B]]})
    p_one = apply_gate(out, "H", [tj]).probability_one(tj)
    out, m2 = measure(out, tj, "X", rng, forced[1])
    tr.measurements.append({"qubit": reg.labels[tj], "basis": "X", "result": m2,
                            "probability": p_one if m2 else 1 - p_one})
    if m2 == 0:
        out = apply_gate(out, "Z", [A])
    tr.corrections.append({"gate": "Z", "targets": [reg.labels[A]], "condition": "m2 == 0",
                           "applied": m2 == 0})

    # direct oracle on the data qubits
    keep = [k for k in range(reg.n) if k not in (ti, tj)]
    rest_reg = QubitRegister(len(keep), rest_in / np.linalg.norm(rest_in),
                             tuple(reg.labels[k] for k in keep))
    expected = apply_gate(rest_reg, "CNOT", [keep.index(A), keep.index(B)]).amplitudes
    anc = np.zeros(4, dtype=complex)
    anc[2 * m1 + m2] = 1.0
    rest_out = project(out, (ti, tj), anc)
    residual = float(max(0.0, 1.0 - np.vdot(rest_out, rest_out).real))
    deviation = float(np.linalg.norm(_align_phase(rest_out, expected) - expected))
    tr.verification = {
        "epr_overlap": f_epr,
        "max_deviation": deviation,
        "transceiver_residual": residual,
        "passed": deviation <= 1e-10 and residual <= 1e-10,
    }
    return out, tr


def compose_with_noisy_gate(gate_fidelity, transcript=None, n_gates=None):
    """Estimate protocol fidelity as F**n over its two-qubit gates (default 2).

    This is a multiplicative estimate, not a density-matrix computation.
    """
    if not 0.0 <= gate_fidelity <= 1.0:
        raise DomainError(f"gate fidelity must lie in [0, 1], got {gate_fidelity}")
    if n_gates is None:
        n_gates = transcript.two_qubit_gates if transcript is not None else 2
    return float(gate_fidelity**n_gates)


def random_state(rng, n=1):
    """Haar-ish random pure state on n qubits (normalized complex Gaussian)."""
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)
