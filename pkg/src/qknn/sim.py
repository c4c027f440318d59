"""Dense state-vector simulator for small quantum registers.

The simulator stores the full complex amplitude vector of an n-qubit
register (length 2**n) and applies gates by reshaping that vector into a
rank-n tensor and contracting the targeted axes with a small gate matrix.
No 2**n x 2**n operator is ever materialised.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of the computational basis index,
  so for two qubits the amplitude order is |00>, |01>, |10>, |11> and
  ``basis_state(2, 2)`` is the state with qubit 0 set to |1>.
* Multi-qubit gate matrices are written in the same ordering: the first
  target supplies the high bit of the row/column index.  For CNOT the
  first target is the control.
* Angles are radians.  RZ(theta) = diag(exp(-i theta/2), exp(+i theta/2))
  and RY(theta) = exp(-i theta Y / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

#: Registers above this size are refused by default; 2**14 complex amplitudes
#: is the largest register the benchmarks need (ancilla + two 6-qubit states).
DEFAULT_MAX_QUBITS = 14

_SQRT2_INV = 1.0 / math.sqrt(2.0)


class ResourceLimitError(ValueError):
    """Raised when a requested register exceeds the configured qubit budget."""


class Gate(Enum):
    """Supported gate kinds."""

    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    T = "T"
    RZ = "RZ"
    RY = "RY"
    CNOT = "CNOT"
    SWAP = "SWAP"
    TOFFOLI = "TOFFOLI"
    ISING_XY = "ISING_XY"


#: Number of target qubits each gate kind acts on.
GATE_ARITY: dict[Gate, int] = {
    Gate.H: 1,
    Gate.X: 1,
    Gate.Y: 1,
    Gate.Z: 1,
    Gate.S: 1,
    Gate.T: 1,
    Gate.RZ: 1,
    Gate.RY: 1,
    Gate.CNOT: 2,
    Gate.SWAP: 2,
    Gate.TOFFOLI: 3,
    Gate.ISING_XY: 2,
}

#: Gate kinds that take an angle parameter.
PARAMETRIC_GATES = frozenset({Gate.RZ, Gate.RY, Gate.ISING_XY})

_FIXED_MATRICES: dict[Gate, np.ndarray] = {
    Gate.H: np.array([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]], dtype=complex),
    Gate.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Gate.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Gate.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Gate.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    Gate.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    Gate.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    Gate.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

# Toffoli: identity except |110> <-> |111> (first two targets are controls).
_TOFFOLI = np.eye(8, dtype=complex)
_TOFFOLI[6, 6] = _TOFFOLI[7, 7] = 0
_TOFFOLI[6, 7] = _TOFFOLI[7, 6] = 1
_FIXED_MATRICES[Gate.TOFFOLI] = _TOFFOLI


def gate_matrix(kind: Gate, angle: float | None = None) -> np.ndarray:
    """Return the unitary matrix of ``kind`` as a fresh complex array.

    Parametric kinds (RZ, RY, ISING_XY) require ``angle``; fixed kinds
    reject one.
    """
    if kind in PARAMETRIC_GATES:
        if angle is None:
            raise ValueError(f"gate {kind.value} requires an angle")
        theta = float(angle)
        if kind is Gate.RZ:
            return np.array(
                [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
            )
        if kind is Gate.RY:
            c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
            return np.array([[c, -s], [s, c]], dtype=complex)
        # exp(-i theta/2 (XX + YY)): identity on |00>,|11>, a rotation mixing
        # |01> and |10>.
        c, s = math.cos(theta), math.sin(theta)
        m = np.eye(4, dtype=complex)
        m[1, 1] = m[2, 2] = c
        m[1, 2] = m[2, 1] = -1j * s
        return m
    if angle is not None:
        raise ValueError(f"gate {kind.value} takes no angle")
    return _FIXED_MATRICES[kind].copy()


@dataclass(frozen=True)
class GateOp:
    """A gate application: kind, target qubits, optional angle.

    For CNOT the target order is (control, target); for Toffoli it is
    (control, control, target).
    """

    kind: Gate
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "targets", targets)
        arity = GATE_ARITY[self.kind]
        if len(targets) != arity:
            raise ValueError(
                f"gate {self.kind.value} needs {arity} target(s), got {len(targets)}"
            )
        if len(set(targets)) != len(targets):
            raise ValueError(f"gate targets must be distinct, got {targets}")
        if any(q < 0 for q in targets):
            raise ValueError(f"gate targets must be non-negative, got {targets}")
        if self.kind in PARAMETRIC_GATES:
            if self.angle is None:
                raise ValueError(f"gate {self.kind.value} requires an angle")
            if not math.isfinite(self.angle):
                raise ValueError(f"gate angle must be finite, got {self.angle}")
        elif self.angle is not None:
            raise ValueError(f"gate {self.kind.value} takes no angle")

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.angle)


@dataclass
class StateVector:
    """An n-qubit pure state: 2**n complex amplitudes, qubit 0 = MSB."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.num_qubits < 1:
            raise ValueError(f"need at least one qubit, got {self.num_qubits}")
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ValueError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"expected ({2**self.num_qubits},)"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class MeasurementSample:
    """Aggregated measurement record: basis index and how often it occurred."""

    basis_index: int
    shot_count: int


def _check_size(num_qubits: int, max_qubits: int) -> None:
    if num_qubits < 1:
        raise ValueError(f"need at least one qubit, got {num_qubits}")
    if num_qubits > max_qubits:
        raise ResourceLimitError(
            f"{num_qubits} qubits exceeds the limit of {max_qubits} "
            f"(2**{num_qubits} amplitudes); raise max_qubits explicitly if intended"
        )


def new_zero_state(num_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Return |0...0> on ``num_qubits`` qubits."""
    _check_size(num_qubits, max_qubits)
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(
    num_qubits: int, index: int, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """Return the computational basis state |index> (qubit 0 = MSB)."""
    _check_size(num_qubits, max_qubits)
    if not 0 <= index < 2**num_qubits:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def bit_value(index: int, qubit: int, num_qubits: int) -> int:
    """Bit of ``qubit`` in basis ``index`` under the MSB-first convention."""
    return (index >> (num_qubits - 1 - qubit)) & 1


def _apply_matrix(
    amplitudes: np.ndarray, matrix: np.ndarray, targets: tuple[int, ...], num_qubits: int
) -> np.ndarray:
    """Contract ``matrix`` onto the target axes of the amplitude tensor."""
    k = len(targets)
    tensor = amplitudes.reshape((2,) * num_qubits)
    moved = np.moveaxis(tensor, targets, tuple(range(k)))
    block = moved.reshape(2**k, -1)
    out = (matrix @ block).reshape((2,) * num_qubits)
    out = np.moveaxis(out, tuple(range(k)), targets)
    return np.ascontiguousarray(out).reshape(2**num_qubits)


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Apply one gate and return the new state; the input is not modified."""
    for q in op.targets:
        if q >= state.num_qubits:
            raise ValueError(
                f"gate targets qubit {q} but the register has {state.num_qubits} qubits"
            )
    new_amps = _apply_matrix(state.amplitudes, op.matrix(), op.targets, state.num_qubits)
    return StateVector(state.num_qubits, new_amps)


def apply_circuit(state: StateVector, ops: list[GateOp]) -> StateVector:
    """Apply a sequence of gates in order."""
    for op in ops:
        state = apply_gate(state, op)
    return state


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Join two registers; the qubits of ``a`` become the high-order qubits."""
    n = a.num_qubits + b.num_qubits
    if n > DEFAULT_MAX_QUBITS:
        raise ResourceLimitError(
            f"joint register of {n} qubits exceeds the limit of {DEFAULT_MAX_QUBITS}"
        )
    return StateVector(n, np.kron(a.amplitudes, b.amplitudes))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> (conjugate-linear in the first argument)."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"register sizes differ: {a.num_qubits} vs {b.num_qubits} qubits"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def z_expectation(state: StateVector, qubit: int) -> float:
    """Expectation of Pauli-Z on one qubit: P(bit=0) - P(bit=1)."""
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.num_qubits} qubits")
    probs = state.probabilities()
    indices = np.arange(probs.size)
    bits = (indices >> (state.num_qubits - 1 - qubit)) & 1
    return float(probs[bits == 0].sum() - probs[bits == 1].sum())


def sample_basis(state: StateVector, shots: int, seed: int) -> list[MeasurementSample]:
    """Draw ``shots`` computational-basis outcomes; deterministic per seed.

    Returns one record per distinct outcome, sorted by basis index.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    probs = state.probabilities()
    total = probs.sum()
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise ValueError(f"state is not normalised (sum of probabilities = {total})")
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(probs.size, size=shots, p=probs / total)
    values, counts = np.unique(outcomes, return_counts=True)
    return [MeasurementSample(int(v), int(c)) for v, c in zip(values, counts)]
