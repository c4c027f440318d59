"""Nearest-neighbour classification with swap-test state fidelities.

The distance statistic is the swap test's ancilla-zero probability
D = 0.5 * (1 + F) where F = |<a|b>|^2, so D lives in [0.5, 1.0] and
*increases* with similarity.  Neighbours are therefore the k training
points with the highest fidelity.  (Describing D as something to
minimise, as "distance" suggests, would invert the ranking; the
closeness semantics win here and the convention is pinned by tests.)

Two evaluation modes are provided:

* exact: F computed directly from the stored amplitudes.  This is the
  default for benchmarks since the simulator has amplitude access.
* sampled: the explicit swap-test circuit (ancilla + H + controlled
  SWAPs + H) is built and measured for a configured number of shots;
  the empirical ancilla-zero frequency estimates D.  Controlled-SWAP is
  decomposed as CNOT.Toffoli.CNOT so only library gates are used.

Optional Pauli noise is injected per trajectory into every encoded
state, either between encoding and feature map, after the feature map,
or both.  Two error-mitigation modes exist for noisy runs: "repeat-vote"
(each sampled ancilla measurement is repeated n times and majority
voted) and "physical-code" (each data qubit's channel draw is passed
through an n-qubit repetition code with syndrome correction before the
surviving logical error touches the state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import Dataset
from .encoding import EncodedPoint, EncodingConfig, apply_feature_map, encode_point
from .noise import (
    InjectionPoint,
    NoiseSpec,
    apply_pauli_errors,
    draw_pauli,
    sample_errors,
)
from .qec import RepetitionCode, code_corrected_flip
from .sim import (
    Gate,
    GateOp,
    StateVector,
    apply_gate,
    inner_product,
    new_zero_state,
    sample_basis,
    tensor_product,
)

DEFAULT_K = 3
DEFAULT_SHOTS = 4096
DISTANCE_MODES = ("exact", "sampled")
MITIGATION_MODES = ("none", "repeat-vote", "physical-code")


@dataclass(frozen=True)
class QknnConfig:
    """Everything a nearest-neighbour experiment needs to be replayable."""

    k: int = DEFAULT_K
    encoding: EncodingConfig = field(default_factory=EncodingConfig)
    use_feature_map: bool = True
    distance_mode: str = "exact"
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    noise: NoiseSpec | None = None
    injection: InjectionPoint = InjectionPoint.AFTER_FEATURE_MAP
    mitigation: str = "none"
    code_length: int = 3

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValueError(
                f"distance mode must be one of {DISTANCE_MODES}, got {self.distance_mode!r}"
            )
        if self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.mitigation not in MITIGATION_MODES:
            raise ValueError(
                f"mitigation must be one of {MITIGATION_MODES}, got {self.mitigation!r}"
            )
        if self.mitigation == "repeat-vote" and self.distance_mode != "sampled":
            raise ValueError(
                "repeat-vote mitigation repeats ancilla measurements and "
                "therefore requires distance_mode='sampled'"
            )
        if self.code_length < 3 or self.code_length % 2 == 0:
            raise ValueError(
                f"code length must be odd and >= 3, got {self.code_length}"
            )


@dataclass
class QknnModel:
    """Encoded training set plus the distance/vote configuration."""

    encoded_train: list[EncodedPoint]
    labels: np.ndarray
    n_classes: int
    k: int = DEFAULT_K
    cfg: EncodingConfig = field(default_factory=EncodingConfig)
    distance_mode: str = "exact"
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    mitigation: str = "none"
    vote_repeats: int = 3

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=int)
        if not self.encoded_train:
            raise ValueError("training set is empty")
        if self.labels.shape != (len(self.encoded_train),):
            raise ValueError(
                f"{self.labels.shape[0]} labels for {len(self.encoded_train)} points"
            )
        if not 1 <= self.k <= len(self.encoded_train):
            raise ValueError(
                f"k must lie in [1, {len(self.encoded_train)}], got {self.k}"
            )
        if self.labels.min() < 0 or self.labels.max() >= self.n_classes:
            raise ValueError(
                f"labels must lie in [0, {self.n_classes}), got range "
                f"[{self.labels.min()}, {self.labels.max()}]"
            )
        if self.distance_mode not in DISTANCE_MODES:
            raise ValueError(f"bad distance mode {self.distance_mode!r}")
        # Exact mode computes all train fidelities against one test state
        # as a single matrix-vector product over this stack.
        self._train_amplitudes = np.stack(
            [p.state.amplitudes for p in self.encoded_train]
        )


@dataclass(frozen=True)
class NeighborSet:
    """k neighbours sorted by descending fidelity (ties: ascending index)."""

    indices: np.ndarray
    fidelities: np.ndarray
    distances: np.ndarray


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    return abs(inner_product(a, b)) ** 2


def swap_test_state(a: StateVector, b: StateVector) -> StateVector:
    """Assemble and run the swap-test circuit, returning the final state.

    Register layout: qubit 0 is the ancilla, qubits 1..d hold ``a`` and
    qubits d+1..2d hold ``b``.  Each controlled-SWAP is decomposed as
    CNOT(b,a) Toffoli(anc,a,b) CNOT(b,a).
    """
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"register sizes differ: {a.num_qubits} vs {b.num_qubits} qubits"
        )
    d = a.num_qubits
    joint = tensor_product(tensor_product(new_zero_state(1), a), b)
    joint = apply_gate(joint, GateOp(Gate.H, (0,)))
    for i in range(d):
        qa, qb = 1 + i, 1 + d + i
        joint = apply_gate(joint, GateOp(Gate.CNOT, (qb, qa)))
        joint = apply_gate(joint, GateOp(Gate.TOFFOLI, (0, qa, qb)))
        joint = apply_gate(joint, GateOp(Gate.CNOT, (qb, qa)))
    return apply_gate(joint, GateOp(Gate.H, (0,)))


def ancilla_zero_probability(swap_state: StateVector) -> float:
    """P(ancilla = 0) of a swap-test output state (ancilla is qubit 0)."""
    half = swap_state.amplitudes.size // 2
    return float(swap_state.probabilities()[:half].sum())


def _sampled_ancilla_zero(
    swap_state: StateVector, shots: int, seed: int
) -> float:
    """Empirical P(ancilla=0) from full-register basis samples."""
    half = swap_state.amplitudes.size // 2
    zeros = sum(
        s.shot_count
        for s in sample_basis(swap_state, shots, seed)
        if s.basis_index < half
    )
    return zeros / shots


def _voted_ancilla_zero(
    swap_state: StateVector, shots: int, repeats: int, seed: int
) -> float:
    """P(ancilla=0) estimate with per-shot repetition and majority vote.

    Each logical shot re-prepares the circuit ``repeats`` times; the
    repeated ancilla bits are i.i.d. over the ancilla marginal, so they
    are drawn directly from it here, and the majority becomes the shot's
    bit.  This amplifies the majority outcome of each pairwise test.
    """
    p_one = 1.0 - ancilla_zero_probability(swap_state)
    rng = np.random.default_rng(seed)
    bits = (rng.random((shots, repeats)) < p_one).astype(int)
    voted_ones = (bits.sum(axis=1) * 2 > repeats).sum()
    return 1.0 - voted_ones / shots


def quantum_distance(
    a: EncodedPoint,
    b: EncodedPoint,
    mode: str = "exact",
    shots: int = DEFAULT_SHOTS,
    seed: int = 0,
) -> float:
    """Swap-test distance D = 0.5 * (1 + |<a|b>|^2); higher = more similar.

    Exact mode computes D from amplitudes.  Sampled mode measures the
    assembled swap-test circuit and returns the raw empirical
    P(ancilla=0), which converges to the same value as shots grow.
    """
    if mode not in DISTANCE_MODES:
        raise ValueError(f"distance mode must be one of {DISTANCE_MODES}, got {mode!r}")
    if mode == "exact":
        return 0.5 * (1.0 + state_fidelity(a.state, b.state))
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    return _sampled_ancilla_zero(swap_test_state(a.state, b.state), shots, seed)


def _pair_seed(model: QknnModel, test: EncodedPoint, train_index: int) -> int:
    # Stable per-pair stream: independent of evaluation order.
    ss = np.random.SeedSequence(
        [model.seed, test.source_row + 1, train_index]
    )
    return int(ss.generate_state(1, np.uint64)[0])


def _pair_fidelities(model: QknnModel, test: EncodedPoint) -> np.ndarray:
    """Fidelity estimates against every training point, clamped to [0, 1]."""
    if model.distance_mode == "exact":
        overlaps = model._train_amplitudes.conj() @ test.state.amplitudes
        return np.abs(overlaps) ** 2
    fids = np.empty(len(model.encoded_train))
    for j, point in enumerate(model.encoded_train):
        swap_state = swap_test_state(point.state, test.state)
        seed = _pair_seed(model, test, j)
        if model.mitigation == "repeat-vote":
            p_zero = _voted_ancilla_zero(
                swap_state, model.shots, model.vote_repeats, seed
            )
        else:
            p_zero = _sampled_ancilla_zero(swap_state, model.shots, seed)
        fids[j] = 2.0 * p_zero - 1.0
    return np.clip(fids, 0.0, 1.0)


def find_neighbors(model: QknnModel, test: EncodedPoint) -> NeighborSet:
    """The k highest-fidelity training points; ties broken by lower index."""
    if test.state.num_qubits != model.encoded_train[0].state.num_qubits:
        raise ValueError(
            f"test point has {test.state.num_qubits} qubits, "
            f"training set has {model.encoded_train[0].state.num_qubits}"
        )
    fids = _pair_fidelities(model, test)
    order = np.lexsort((np.arange(fids.size), -fids))
    chosen = order[: model.k]
    kept = fids[chosen]
    return NeighborSet(
        indices=chosen, fidelities=kept, distances=0.5 * (1.0 + kept)
    )


def classify(model: QknnModel, test: EncodedPoint) -> tuple[int, np.ndarray]:
    """Majority vote among the k neighbours.

    Vote ties are broken by the larger summed fidelity among the tied
    classes, then by the lower class index.  The returned score vector is
    the fidelity-weighted vote share per class (sums to 1); when every
    neighbour fidelity is ~0 the plain count share is used instead.
    """
    neighbors = find_neighbors(model, test)
    neighbor_labels = model.labels[neighbors.indices]
    votes = np.bincount(neighbor_labels, minlength=model.n_classes).astype(float)
    candidates = np.flatnonzero(votes == votes.max())
    if candidates.size > 1:
        sums = np.array(
            [neighbors.fidelities[neighbor_labels == c].sum() for c in candidates]
        )
        candidates = candidates[sums == sums.max()]
    label = int(candidates[0])
    total = neighbors.fidelities.sum()
    if total > 1e-12:
        scores = (
            np.bincount(
                neighbor_labels,
                weights=neighbors.fidelities,
                minlength=model.n_classes,
            )
            / total
        )
    else:
        scores = votes / votes.sum()
    return label, scores


def _physical_code_errors(
    spec: NoiseSpec,
    qubits: Sequence[int],
    rng: np.random.Generator,
    code: RepetitionCode,
) -> list[tuple[int, str]]:
    """Channel draw for each qubit filtered through a repetition code.

    Each data qubit is treated as logically encoded across ``code.n``
    physical qubits, each of which suffers an independent channel draw.
    The X component of the draws runs through the real encode/syndrome/
    correct/decode path; a surviving majority becomes a logical X.  Z
    components combine by parity (the bit-flip code offers no phase
    protection).  Both surviving -> Y (= XZ up to global phase).
    """
    errors = []
    for q in qubits:
        draws = [draw_pauli(spec, rng) for _ in range(code.n)]
        flips = [1 if d in ("X", "Y") else 0 for d in draws]
        logical_x = code_corrected_flip(flips, code) if any(flips) else 0
        logical_z = sum(1 for d in draws if d in ("Z", "Y")) % 2
        if logical_x and logical_z:
            errors.append((int(q), "Y"))
        elif logical_x:
            errors.append((int(q), "X"))
        elif logical_z:
            errors.append((int(q), "Z"))
    return errors


def _inject(
    state: StateVector, cfg: QknnConfig, rng: np.random.Generator
) -> StateVector:
    qubits = range(state.num_qubits)
    if cfg.mitigation == "physical-code":
        errors = _physical_code_errors(
            cfg.noise, qubits, rng, RepetitionCode(cfg.code_length)
        )
    else:
        errors = sample_errors(cfg.noise, qubits, rng)
    return apply_pauli_errors(state, errors)


def _encode_rows(
    features: np.ndarray, cfg: QknnConfig, rng: np.random.Generator
) -> list[EncodedPoint]:
    """Encode rows, optionally interleaving one noise trajectory per point."""
    noisy = cfg.noise is not None and cfg.noise.p > 0.0
    before = noisy and cfg.injection in (InjectionPoint.AFTER_ENCODING, InjectionPoint.BOTH)
    after = noisy and cfg.injection in (InjectionPoint.AFTER_FEATURE_MAP, InjectionPoint.BOTH)
    points = []
    for row_index, row in enumerate(features):
        point = encode_point(row, cfg.encoding, source_row=row_index)
        if before:
            point.state = _inject(point.state, cfg, rng)
        if cfg.use_feature_map:
            point = apply_feature_map(point)
        if after:
            point.state = _inject(point.state, cfg, rng)
        points.append(point)
    return points


def _check_schema(train: Dataset, test: Dataset) -> None:
    if train.n_features != test.n_features:
        raise ValueError(
            f"feature count mismatch: train has {train.n_features}, "
            f"test has {test.n_features}"
        )
    if train.class_names != test.class_names:
        raise ValueError(
            f"class mismatch: train has {train.class_names}, "
            f"test has {test.class_names}"
        )


def fit(train: Dataset, cfg: QknnConfig) -> QknnModel:
    """Encode a training dataset into a ready-to-classify model."""
    if train.n_instances == 0:
        raise ValueError("training set is empty")
    rng = np.random.default_rng(cfg.seed)
    return QknnModel(
        encoded_train=_encode_rows(train.features, cfg, rng),
        labels=train.labels,
        n_classes=train.n_classes,
        k=cfg.k,
        cfg=cfg.encoding,
        distance_mode=cfg.distance_mode,
        shots=cfg.shots,
        seed=cfg.seed,
        mitigation=cfg.mitigation,
        vote_repeats=cfg.code_length,
    )


def fit_predict(
    train: Dataset, test: Dataset, cfg: QknnConfig
) -> tuple[np.ndarray, np.ndarray]:
    """End-to-end pipeline: encode both sets, classify every test row.

    Returns (predicted labels, score matrix [n_test, n_classes]).  With a
    noise spec each encoded state receives one trajectory draw, so one
    call is one trajectory; rerun with different seeds to average.
    Deterministic for a fixed config.
    """
    if train.n_instances == 0:
        raise ValueError("training set is empty")
    _check_schema(train, test)
    rng = np.random.default_rng(cfg.seed)
    model = QknnModel(
        encoded_train=_encode_rows(train.features, cfg, rng),
        labels=train.labels,
        n_classes=train.n_classes,
        k=cfg.k,
        cfg=cfg.encoding,
        distance_mode=cfg.distance_mode,
        shots=cfg.shots,
        seed=cfg.seed,
        mitigation=cfg.mitigation,
        vote_repeats=cfg.code_length,
    )
    encoded_test = _encode_rows(test.features, cfg, rng)
    predictions = np.empty(test.n_instances, dtype=int)
    scores = np.empty((test.n_instances, train.n_classes))
    for i, point in enumerate(encoded_test):
        predictions[i], scores[i] = classify(model, point)
    return predictions, scores
