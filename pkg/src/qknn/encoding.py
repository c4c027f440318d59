"""Classical-to-quantum feature encodings.

Two encodings are provided:

* Phase encoding (used by the nearest-neighbour classifier): each feature
  x_i in [0, 1] is written onto its own qubit as RZ(scale * x_i) H |0>,
  i.e. an equal superposition whose relative phase carries the value.
  With the default scale of 2*pi the single-feature state fidelity is
  cos(pi * (x - y))**2, so the encoding is periodic and x = 0 and x = 1
  land on the same state.  Callers that need to distinguish the endpoints
  should pass a smaller ``angle_scale``.
* Angle embedding (used by the variational classifier): RY(x_i) per qubit,
  which stores the value in the |0>/|1> amplitude balance instead of a
  phase and is therefore visible to Z-basis readout.

An optional entangling feature map walks a linear chain of qubit pairs
(0,1), (1,2), ... applying an XX+YY interaction followed by CNOT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sim import Gate, GateOp, StateVector, apply_gate, new_zero_state

DEFAULT_ANGLE_SCALE = 2.0 * math.pi
DEFAULT_FEATURE_MAP_ANGLE = math.pi / 2.0


@dataclass(frozen=True)
class EncodingConfig:
    """Parameters of the phase encoding and its entangling map."""

    angle_scale: float = DEFAULT_ANGLE_SCALE
    feature_map_angle: float = DEFAULT_FEATURE_MAP_ANGLE
    entangle_topology: str = "linear-chain"

    def __post_init__(self) -> None:
        if not math.isfinite(self.angle_scale):
            raise ValueError(f"angle_scale must be finite, got {self.angle_scale}")
        if not math.isfinite(self.feature_map_angle):
            raise ValueError(
                f"feature_map_angle must be finite, got {self.feature_map_angle}"
            )
        if self.entangle_topology != "linear-chain":
            raise ValueError(
                f"unknown entangle topology {self.entangle_topology!r}; "
                "only 'linear-chain' is supported"
            )


@dataclass
class EncodedPoint:
    """A feature vector realised as a quantum state.

    ``source_row`` keeps the row index of the originating dataset instance
    (-1 for ad-hoc points) so downstream sampling can derive stable seeds.
    """

    state: StateVector
    source_row: int = -1
    config: EncodingConfig = field(default_factory=EncodingConfig)


def _check_features(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"expected a non-empty 1-D feature vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature vector contains non-finite values")
    if np.any(x < 0.0) or np.any(x > 1.0):
        bad = x[(x < 0.0) | (x > 1.0)]
        raise ValueError(f"features must lie in [0, 1]; offending values: {bad[:5]}")
    return x


def encode_point(
    x: np.ndarray, config: EncodingConfig | None = None, source_row: int = -1
) -> EncodedPoint:
    """Phase-encode a feature vector in [0, 1]**d onto d qubits."""
    config = config or EncodingConfig()
    x = _check_features(x)
    state = new_zero_state(x.size)
    for i, value in enumerate(x):
        state = apply_gate(state, GateOp(Gate.H, (i,)))
        state = apply_gate(state, GateOp(Gate.RZ, (i,), config.angle_scale * value))
    return EncodedPoint(state=state, source_row=source_row, config=config)


def apply_feature_map(point: EncodedPoint, config: EncodingConfig | None = None) -> EncodedPoint:
    """Entangle adjacent qubits: IsingXY(angle) then CNOT on each chain pair.

    Single-qubit registers have no pairs and pass through unchanged.
    """
    config = config or point.config
    state = point.state
    for i in range(state.num_qubits - 1):
        state = apply_gate(
            state, GateOp(Gate.ISING_XY, (i, i + 1), config.feature_map_angle)
        )
        state = apply_gate(state, GateOp(Gate.CNOT, (i, i + 1)))
    return EncodedPoint(state=state, source_row=point.source_row, config=config)


def angle_embed(x: np.ndarray, n_qubits: int) -> StateVector:
    """RY-rotate each qubit by its feature value: amplitude-balance encoding."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != n_qubits:
        raise ValueError(
            f"expected {n_qubits} features for {n_qubits} qubits, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("feature vector contains non-finite values")
    state = new_zero_state(n_qubits)
    for i, value in enumerate(x):
        state = apply_gate(state, GateOp(Gate.RY, (i,), float(value)))
    return state
