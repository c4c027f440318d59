"""Independent reference constructions used to pin implementation results.

Everything here is deliberately written with a different technique than
the library code: dense operators are assembled by explicit bit
arithmetic instead of axis reshuffling, AUC is integrated from an ROC
curve instead of ranked, chi-square tables are accumulated with plain
Python loops, and gradients come from finite differences.
"""

from __future__ import annotations

import numpy as np


def dense_operator(gate: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Embed a small gate matrix into the full 2**n operator.

    Basis convention: qubit 0 is the most significant bit.  Entry
    (row, col) is <row|U|col>; it is the gate entry addressed by the
    target-qubit bits of row/col when all other bits agree, else 0.
    """
    dim = 2**n
    k = len(targets)
    full = np.zeros((dim, dim), dtype=complex)
    others = [q for q in range(n) if q not in targets]
    for col in range(dim):
        col_sub = 0
        for t in targets:
            col_sub = (col_sub << 1) | ((col >> (n - 1 - t)) & 1)
        for row_sub in range(2**k):
            row = col
            for pos, t in enumerate(targets):
                bit = (row_sub >> (k - 1 - pos)) & 1
                mask = 1 << (n - 1 - t)
                row = (row & ~mask) | (bit * mask)
            full[row, col] = gate[row_sub, col_sub]
    # sanity: untouched qubits must be untouched
    assert all((q in targets) or (q in others) for q in range(n))
    return full


def apply_dense(
    amplitudes: np.ndarray, gate: np.ndarray, targets: tuple[int, ...], n: int
) -> np.ndarray:
    return dense_operator(gate, targets, n) @ amplitudes


def trapezoid_auc(y_positive: np.ndarray, scores: np.ndarray) -> float:
    """Area under the ROC curve by explicit threshold sweep + trapezoids."""
    y_positive = np.asarray(y_positive, dtype=bool)
    scores = np.asarray(scores, dtype=float)
    n_pos = int(y_positive.sum())
    n_neg = int((~y_positive).sum())
    thresholds = np.unique(scores)[::-1]
    points = [(0.0, 0.0)]
    for t in thresholds:
        predicted = scores >= t
        tpr = (predicted & y_positive).sum() / n_pos
        fpr = (predicted & ~y_positive).sum() / n_neg
        points.append((fpr, tpr))
    points.append((1.0, 1.0))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def chi2_bruteforce(
    column: np.ndarray, labels: np.ndarray, n_classes: int, bins: int
) -> tuple[float, int]:
    """Chi-square statistic and dof from a hand-built contingency table."""
    lo = min(column)
    hi = max(column)
    if hi <= lo:
        return 0.0, 0
    width = (hi - lo) / bins
    counts: dict[tuple[int, int], int] = {}
    for value, label in zip(column, labels):
        b = int((value - lo) / width)
        if b >= bins:
            b = bins - 1
        counts[(b, int(label))] = counts.get((b, int(label)), 0) + 1
    occupied_bins = sorted({b for b, _ in counts})
    occupied_classes = sorted({c for _, c in counts})
    total = sum(counts.values())
    row_totals = {
        b: sum(counts.get((b, c), 0) for c in occupied_classes) for b in occupied_bins
    }
    col_totals = {
        c: sum(counts.get((b, c), 0) for b in occupied_bins) for c in occupied_classes
    }
    statistic = 0.0
    for b in occupied_bins:
        for c in occupied_classes:
            expected = row_totals[b] * col_totals[c] / total
            observed = counts.get((b, c), 0)
            statistic += (observed - expected) ** 2 / expected
    dof = (len(occupied_bins) - 1) * (len(occupied_classes) - 1)
    return statistic, dof


def finite_difference_gradient(loss_fn, params: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Central finite differences of a scalar function of a parameter array."""
    grad = np.zeros_like(params)
    it = np.nditer(params, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        plus = params.copy()
        plus[idx] += h
        minus = params.copy()
        minus[idx] -= h
        grad[idx] = (loss_fn(plus) - loss_fn(minus)) / (2.0 * h)
        it.iternext()
    return grad


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """A Haar-ish random normalized amplitude vector."""
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return amps / np.linalg.norm(amps)
