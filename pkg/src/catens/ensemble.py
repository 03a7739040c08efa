"""Second-stage ensembling of base hierarchical clusterings.

A batch of base clusterings of sizes ``K_b ~ DUnif[k_min, k_max]`` is cut
from one dendrogram and stacked into an incidence matrix; the ensemble
dissimilarity between two rows is the fraction of base clusterings that
separate them.  Re-clustering that matrix with the same linkage gives the
ensembled variants of single/average/complete linkage clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import CategoricalMatrix, Clustering, DataError, DissimilarityMatrix, hamming
from .hclust import Dendrogram, agglomerate, cut_with_outlier_deferral, normalize_linkage
from .rng import substream

_BLOCK_ELEMS = 2**26


@dataclass(frozen=True)
class IncidenceMatrix:
    """``n x B`` table whose column ``b`` holds each row's cluster index in
    the ``b``-th base clustering.  Labels are only comparable within a
    column, never across columns."""

    entries: np.ndarray
    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = np.ascontiguousarray(np.asarray(self.entries, dtype=np.int64))
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise DataError("incidence matrix must be a non-empty 2-D array")
        if len(self.sizes) != entries.shape[1]:
            raise DataError("one cluster count per column required")
        for b, k in enumerate(self.sizes):
            if not np.array_equal(np.unique(entries[:, b]), np.arange(k)):
                raise DataError(f"column {b} must use labels exactly [0, {k})")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def B(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class EnsembleConfig:
    """Knobs for one ensembling stage.

    ``k_min``/``k_max`` default to 2 and ``ceil(sqrt(n))`` at draw time.
    ``distinct=True`` draws the base sizes without replacement, which
    requires the range to hold at least ``B`` values.
    """

    B: int = 25
    k_min: int | None = None
    k_max: int | None = None
    linkage: str = "AL"
    seed: int = 0
    alpha: float = 0.0
    distinct: bool = False

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError("ensemble size B must be >= 1")
        if not 0.0 <= self.alpha < 0.5:
            raise ValueError("alpha must lie in [0, 0.5)")
        object.__setattr__(self, "linkage", normalize_linkage(self.linkage))

    def k_range(self, n: int) -> tuple[int, int]:
        k_min = 2 if self.k_min is None else self.k_min
        k_max = math.ceil(math.sqrt(n)) if self.k_max is None else self.k_max
        if k_max < k_min:
            raise ValueError(f"empty size range [{k_min}, {k_max}] (n={n})")
        if not 2 <= k_min <= k_max <= n:
            raise ValueError(f"size range [{k_min}, {k_max}] must satisfy 2 <= k_min <= k_max <= n")
        return k_min, k_max


def draw_sizes(cfg: EnsembleConfig, n: int) -> np.ndarray:
    """Draw the ``B`` base clustering sizes for a dataset of ``n`` rows."""
    k_min, k_max = cfg.k_range(n)
    rng = substream(cfg.seed)
    values = np.arange(k_min, k_max + 1)
    if cfg.distinct:
        if cfg.B > values.size:
            raise ValueError(f"cannot draw {cfg.B} distinct sizes from [{k_min}, {k_max}]")
        return np.sort(rng.choice(values, size=cfg.B, replace=False))
    return rng.integers(k_min, k_max + 1, size=cfg.B)


def build_incidence(
    d: DissimilarityMatrix,
    sizes: np.ndarray,
    linkage: str = "AL",
    alpha: float = 0.0,
) -> IncidenceMatrix:
    """Cut one dendrogram of ``d`` at every requested size.

    Base clusterings are deterministic given (d, size, linkage), so the only
    ensemble randomness lives in the size draws.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    if np.any(sizes < 1) or np.any(sizes > d.n):
        raise ValueError(f"base clustering sizes must lie in [1, {d.n}]")
    tree = agglomerate(d, linkage)
    columns = []
    actual = []
    for k in sizes:
        c = cut_with_outlier_deferral(tree, int(k), alpha)
        columns.append(c.labels)
        actual.append(c.K)
    return IncidenceMatrix(entries=np.stack(columns, axis=1), sizes=tuple(actual))


def ensemble_dissimilarity(w: IncidenceMatrix) -> DissimilarityMatrix:
    """Fraction of base clusterings separating each pair of rows.

    Entries are compared within their own column only; the result takes
    values in {0, 1/B, ..., 1} and is exactly symmetric with zero diagonal.
    """
    entries = w.entries
    n, B = entries.shape
    counts = np.empty((n, n), dtype=np.int64)
    block = max(1, _BLOCK_ELEMS // (n * B))
    for s in range(0, n, block):
        e = min(n, s + block)
        diff = entries[s:e, None, :] != entries[None, :, :]
        counts[s:e] = diff.sum(axis=2, dtype=np.int64)
    values = counts / B
    np.fill_diagonal(values, 0.0)
    return DissimilarityMatrix(values=values, kind="ensemble")


def ensemble_cluster(
    data: CategoricalMatrix | DissimilarityMatrix,
    cfg: EnsembleConfig,
    k_final: int,
) -> tuple[Clustering, Dendrogram]:
    """Two-stage ensembled clustering (ENSL/ENAL/ENCL by ``cfg.linkage``).

    Base dissimilarity -> incidence matrix of base cuts -> ensemble
    dissimilarity -> re-agglomeration under the same linkage -> cut at
    ``k_final``.  Using the same linkage at both stages follows the finding
    that mixed-linkage pipelines do worse.
    """
    leaf_labels = None
    if isinstance(data, CategoricalMatrix):
        d = hamming(data, normalized=True)
        leaf_labels = data.row_ids
    else:
        d = data
    sizes = draw_sizes(cfg, d.n)
    w = build_incidence(d, sizes, cfg.linkage, cfg.alpha)
    t = ensemble_dissimilarity(w)
    tree = agglomerate(t, cfg.linkage, leaf_labels=leaf_labels)
    return cut_with_outlier_deferral(tree, k_final, cfg.alpha), tree


def with_seed(cfg: EnsembleConfig, seed: int) -> EnsembleConfig:
    """Copy of ``cfg`` with a different seed (handy for substream reseeding)."""
    return replace(cfg, seed=seed)


def config_to_mapping(cfg: EnsembleConfig) -> dict[str, str]:
    """Flat key=value view of a config, for the config-file format."""
    out = {
        "ensemble-size": str(cfg.B),
        "linkage": cfg.linkage,
        "seed": str(cfg.seed),
        "alpha": repr(cfg.alpha),
        "distinct": str(cfg.distinct).lower(),
    }
    if cfg.k_min is not None:
        out["k-min"] = str(cfg.k_min)
    if cfg.k_max is not None:
        out["k-max"] = str(cfg.k_max)
    return out


def config_from_mapping(values: dict[str, str]) -> EnsembleConfig:
    """Inverse of :func:`config_to_mapping`; unknown keys are rejected."""
    known = {"ensemble-size", "linkage", "seed", "alpha", "distinct", "k-min", "k-max"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown ensemble config keys: {sorted(unknown)}")
    return EnsembleConfig(
        B=int(values.get("ensemble-size", 25)),
        k_min=int(values["k-min"]) if "k-min" in values else None,
        k_max=int(values["k-max"]) if "k-max" in values else None,
        linkage=values.get("linkage", "AL"),
        seed=int(values.get("seed", 0)),
        alpha=float(values.get("alpha", 0.0)),
        distinct=values.get("distinct", "false").lower() == "true",
    )
