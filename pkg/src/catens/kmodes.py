"""K-modes baseline and its evidence-accumulation ensemble (EN-KM).

K-modes alternates nearest-mode assignment under the Hamming distance with
componentwise recomputation of each mode as the most frequent code among
members.  Ties are deterministic: assignment prefers the lowest cluster
index, mode updates prefer the smallest code, and empty clusters are
reseeded from the point farthest from its current mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CategoricalMatrix, Clustering, DataError, relabel_dense
from .ensemble import IncidenceMatrix, ensemble_dissimilarity
from .hclust import agglomerate, cut
from .rng import substream


@dataclass(frozen=True)
class KModesState:
    """Converged K-modes run: modes, assignments and total Hamming cost."""

    modes: np.ndarray
    labels: np.ndarray
    cost: int
    n_iter: int

    def __post_init__(self) -> None:
        for name in ("modes", "labels"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name)))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def _assign(codes: np.ndarray, modes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dist = (codes[:, None, :] != modes[None, :, :]).sum(axis=2, dtype=np.int64)
    labels = dist.argmin(axis=1)
    return labels, dist[np.arange(codes.shape[0]), labels]


def _update_modes(codes: np.ndarray, labels: np.ndarray, k: int, span: int) -> np.ndarray:
    n, J = codes.shape
    offsets = np.arange(J, dtype=np.int64) * span
    modes = np.empty((k, J), dtype=codes.dtype)
    for c in range(k):
        member = codes[labels == c]
        flat = (member.astype(np.int64) + offsets[None, :]).ravel()
        counts = np.bincount(flat, minlength=J * span).reshape(J, span)
        modes[c] = counts.argmax(axis=1)
    return modes


def kmodes(
    x: CategoricalMatrix,
    k: int,
    seed: int | np.random.Generator = 0,
    max_iter: int = 100,
) -> KModesState:
    """K-modes with random initial modes drawn from the observations.

    Stops at a label fixpoint or after ``max_iter`` iterations; the cost
    (total Hamming distance of points to their assigned modes) never
    increases across iterations.
    """
    if x.has_gaps:
        raise DataError("k-modes requires gap-free data")
    if not 1 <= k <= x.n:
        raise ValueError(f"cluster count must lie in [1, {x.n}], got {k}")
    rng = substream(seed)
    codes = x.codes
    n = x.n
    span = int(x.cardinalities.max())
    modes = codes[rng.choice(n, size=k, replace=False)].copy()
    labels, dist = _assign(codes, modes)
    _repair_empty(codes, modes, labels, dist, k)
    it = 0
    for it in range(1, max_iter + 1):
        modes = _update_modes(codes, labels, k, span)
        new_labels, dist = _assign(codes, modes)
        _repair_empty(codes, modes, new_labels, dist, k)
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    cost = int((codes != modes[labels]).sum())
    return KModesState(modes=modes, labels=labels, cost=cost, n_iter=it)


def _repair_empty(
    codes: np.ndarray,
    modes: np.ndarray,
    labels: np.ndarray,
    dist: np.ndarray,
    k: int,
) -> None:
    present = np.bincount(labels, minlength=k) > 0
    for c in np.nonzero(~present)[0]:
        far = int(np.argmax(dist))
        labels[far] = c
        modes[c] = codes[far]
        dist[far] = 0


def en_kmodes(
    x: CategoricalMatrix,
    k_final: int,
    B: int = 25,
    seed: int = 0,
    max_iter: int = 100,
) -> Clustering:
    """Evidence-accumulation ensemble over ``B`` randomized K-modes runs.

    Run sizes follow ``DUnif[2, ceil(sqrt(n))]`` and each run gets a fresh
    random initialization; the runs are combined through the ensemble
    dissimilarity, re-clustered under average linkage and cut at
    ``k_final``.
    """
    if B < 1:
        raise ValueError("ensemble size B must be >= 1")
    k_max = int(np.ceil(np.sqrt(x.n)))
    sizes = substream(seed).integers(2, k_max + 1, size=B)
    columns = []
    actual = []
    for b, k_b in enumerate(sizes):
        state = kmodes(x, int(k_b), seed=substream(seed, b), max_iter=max_iter)
        dense = relabel_dense(state.labels)
        columns.append(dense.labels)
        actual.append(dense.K)
    w = IncidenceMatrix(entries=np.stack(columns, axis=1), sizes=tuple(actual))
    tree = agglomerate(ensemble_dissimilarity(w), "AL", leaf_labels=x.row_ids)
    return cut(tree, k_final)
