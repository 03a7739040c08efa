"""Domain types and pairwise dissimilarity kernels for categorical data.

A dataset is an ``n x J`` table of nominal codes (:class:`CategoricalMatrix`).
Column alphabets are finite and per-column bounded; an optional reserved gap
code marks alignment placeholders in pre-aligned sequence data.  Pairwise
mismatch counting (:func:`hamming`) is the only notion of distance used
anywhere in the package: plain counts, counts normalized by the number of
compared positions, and the gap-aware variant that skips positions where
either row holds a gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

GAP_CODE = -1

# cap on the number of elements materialized per broadcasting block in hamming()
_BLOCK_ELEMS = 2**26


class DataError(ValueError):
    """Malformed input data (ragged table, bad file, incomparable rows)."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class CategoricalMatrix:
    """An ``n x J`` observation table of per-column integer codes.

    ``codes[i, j]`` is a code in ``[0, cardinalities[j])`` or, when
    ``gap_code`` is set, the reserved gap value.  ``labels`` optionally maps
    codes back to the original strings per column; ``row_ids`` optionally
    names the rows (e.g. FASTA record ids).
    """

    codes: np.ndarray
    cardinalities: np.ndarray
    gap_code: int | None = None
    labels: tuple[tuple[str, ...], ...] | None = None
    gap_symbol: str | None = None
    row_ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        codes = np.ascontiguousarray(np.asarray(self.codes, dtype=np.int32))
        cards = np.asarray(self.cardinalities, dtype=np.int64)
        if codes.ndim != 2 or codes.shape[0] < 1 or codes.shape[1] < 1:
            raise DataError("observation table must be a non-empty 2-D array")
        if cards.shape != (codes.shape[1],):
            raise DataError("one cardinality per column required")
        if np.any(cards < 1):
            raise DataError("column cardinalities must be >= 1")
        gap = codes == self.gap_code if self.gap_code is not None else np.zeros(codes.shape, bool)
        valid = (codes >= 0) & (codes < cards[None, :])
        if not np.all(valid | gap):
            raise DataError("non-gap codes must lie in [0, cardinality) for every column")
        if self.row_ids is not None and len(self.row_ids) != codes.shape[0]:
            raise DataError("one row id per row required")
        object.__setattr__(self, "codes", _freeze(codes))
        object.__setattr__(self, "cardinalities", _freeze(cards))

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def J(self) -> int:
        return self.codes.shape[1]

    @property
    def has_gaps(self) -> bool:
        return self.gap_code is not None and bool(np.any(self.codes == self.gap_code))

    def select_columns(self, indices: Sequence[int]) -> "CategoricalMatrix":
        """Restriction to the given columns, preserving metadata."""
        idx = np.asarray(indices, dtype=np.intp)
        if idx.size == 0:
            raise DataError("cannot restrict to an empty column set")
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[int(j)] for j in idx)
        return CategoricalMatrix(
            codes=self.codes[:, idx],
            cardinalities=self.cardinalities[idx],
            gap_code=self.gap_code,
            labels=labels,
            gap_symbol=self.gap_symbol,
            row_ids=self.row_ids,
        )

    def decode(self) -> list[list[str]]:
        """Original string table; inverse of :func:`encode` when labels exist."""
        gap_sym = self.gap_symbol if self.gap_symbol is not None else "-"
        out: list[list[str]] = []
        for i in range(self.n):
            row: list[str] = []
            for j in range(self.J):
                c = int(self.codes[i, j])
                if self.gap_code is not None and c == self.gap_code:
                    row.append(gap_sym)
                elif self.labels is not None:
                    row.append(self.labels[j][c])
                else:
                    row.append(str(c))
            out.append(row)
        return out


@dataclass(frozen=True)
class MembershipMatrix:
    """Per-column one-hot blocks; block ``j`` has shape ``(n, a_j)``."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        for b in self.blocks:
            _freeze(b)

    @property
    def width(self) -> int:
        return sum(b.shape[1] for b in self.blocks)

    def dense(self) -> np.ndarray:
        """Concatenated ``(n, sum a_j)`` one-hot matrix."""
        return np.hstack(self.blocks)


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric non-negative ``n x n`` matrix with zero diagonal.

    ``kind`` is one of ``raw-count`` (integer mismatch counts), ``normalized``
    (counts divided by compared positions, in [0, 1]) or ``ensemble``
    (fraction of base clusterings separating a pair, in [0, 1]).
    """

    values: np.ndarray
    kind: str = "normalized"

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1] or vals.shape[0] < 1:
            raise DataError("dissimilarity matrix must be square and non-empty")
        if not np.all(np.isfinite(vals)):
            raise DataError("dissimilarity matrix contains NaN or infinite entries")
        if not np.array_equal(vals, vals.T):
            raise DataError("dissimilarity matrix must be symmetric")
        if np.any(np.diagonal(vals) != 0.0):
            raise DataError("dissimilarity matrix must have a zero diagonal")
        if np.any(vals < 0.0):
            raise DataError("dissimilarity values must be non-negative")
        if self.kind in ("normalized", "ensemble") and np.any(vals > 1.0):
            raise DataError(f"{self.kind} dissimilarities must lie in [0, 1]")
        if self.kind == "raw-count" and np.any(vals != np.floor(vals)):
            raise DataError("raw-count dissimilarities must be integers")
        if self.kind not in ("raw-count", "normalized", "ensemble"):
            raise ValueError(f"unknown dissimilarity kind: {self.kind!r}")
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def n(self) -> int:
        return self.values.shape[0]


def encode(
    raw_table: Sequence[Sequence[str]],
    gap_symbol: str | None = None,
    row_ids: Sequence[str] | None = None,
) -> CategoricalMatrix:
    """Encode a rectangular table of strings as dense per-column codes.

    Codes are assigned in first-appearance order down each column; the gap
    symbol (when given) maps to the reserved gap code and is excluded from
    the column alphabet.  The code-to-string maps are retained so the table
    round-trips through :meth:`CategoricalMatrix.decode`.
    """
    rows = [list(r) for r in raw_table]
    if not rows or not rows[0]:
        raise DataError("empty table")
    n, J = len(rows), len(rows[0])
    if any(len(r) != J for r in rows):
        raise DataError("ragged rows: all rows must have the same length")
    codes = np.empty((n, J), dtype=np.int32)
    cards = np.empty(J, dtype=np.int64)
    labels: list[tuple[str, ...]] = []
    for j in range(J):
        seen: dict[str, int] = {}
        for i in range(n):
            v = rows[i][j]
            if gap_symbol is not None and v == gap_symbol:
                codes[i, j] = GAP_CODE
                continue
            if v not in seen:
                seen[v] = len(seen)
            codes[i, j] = seen[v]
        if not seen:
            raise DataError(f"column {j} contains only gaps")
        cards[j] = len(seen)
        labels.append(tuple(seen))
    return CategoricalMatrix(
        codes=codes,
        cardinalities=cards,
        gap_code=GAP_CODE if gap_symbol is not None else None,
        labels=tuple(labels),
        gap_symbol=gap_symbol,
        row_ids=tuple(row_ids) if row_ids is not None else None,
    )


def membership(x: CategoricalMatrix) -> MembershipMatrix:
    """One-hot membership blocks, one per column.  Undefined for gaps."""
    if x.has_gaps:
        raise DataError("membership is undefined for tables containing gaps")
    blocks = []
    for j in range(x.J):
        a = int(x.cardinalities[j])
        block = np.zeros((x.n, a), dtype=np.int8)
        block[np.arange(x.n), x.codes[:, j]] = 1
        blocks.append(block)
    return MembershipMatrix(blocks=tuple(blocks))


def hamming(x: CategoricalMatrix, normalized: bool = False) -> DissimilarityMatrix:
    """Pairwise mismatch counts between all rows of ``x``.

    Positions where either row holds a gap are omitted from both the count
    and, in the normalized form, the denominator; a pair of rows with no
    comparable positions is an error.  Accumulation is pure integer work,
    with the normalizing division done once per pair at the end, so results
    are bitwise-identical however the row blocks are scheduled.
    """
    if x.n < 2:
        raise DataError("need at least two rows to form pairwise dissimilarities")
    codes = x.codes
    n, J = codes.shape
    counts = np.empty((n, n), dtype=np.int64)
    block = max(1, _BLOCK_ELEMS // (n * J))
    if x.has_gaps:
        nongap = codes != x.gap_code
        denom = np.empty((n, n), dtype=np.int64)
        for s in range(0, n, block):
            e = min(n, s + block)
            comp = nongap[s:e, None, :] & nongap[None, :, :]
            diff = comp & (codes[s:e, None, :] != codes[None, :, :])
            counts[s:e] = diff.sum(axis=2, dtype=np.int64)
            denom[s:e] = comp.sum(axis=2, dtype=np.int64)
        off = ~np.eye(n, dtype=bool)
        if np.any(denom[off] == 0):
            i, k = np.argwhere((denom == 0) & off)[0]
            raise DataError(f"rows {i} and {k} share no comparable (non-gap) positions")
    else:
        denom = np.full((n, n), J, dtype=np.int64)
        for s in range(0, n, block):
            e = min(n, s + block)
            diff = codes[s:e, None, :] != codes[None, :, :]
            counts[s:e] = diff.sum(axis=2, dtype=np.int64)
    if normalized:
        values = counts / np.where(denom == 0, 1, denom)
        kind = "normalized"
    else:
        values = counts.astype(np.float64)
        kind = "raw-count"
    np.fill_diagonal(values, 0.0)
    return DissimilarityMatrix(values=values, kind=kind)


def _nearest_rank(sorted_col: np.ndarray, percent: int) -> float:
    # 1-based rank ceil(percent * n / 100), in integer arithmetic
    n = sorted_col.shape[0]
    rank = (percent * n + 99) // 100
    return float(sorted_col[max(rank, 1) - 1])


def trichotomize(real_table: Sequence[Sequence[float]] | np.ndarray) -> CategoricalMatrix:
    """Discretize real columns into 3 codes at their 33rd/66th percentiles.

    Percentiles follow the nearest-rank convention on the sorted column and
    values equal to a cut point fall in the lower bin.  Every column must
    have at least three distinct values.
    """
    table = np.asarray(real_table, dtype=np.float64)
    if table.ndim != 2 or table.size == 0:
        raise DataError("expected a non-empty 2-D real table")
    n, J = table.shape
    codes = np.empty((n, J), dtype=np.int32)
    for j in range(J):
        col = table[:, j]
        if np.unique(col).size < 3:
            raise DataError(f"column {j} has fewer than 3 distinct values")
        s = np.sort(col)
        lo, hi = _nearest_rank(s, 33), _nearest_rank(s, 66)
        codes[:, j] = np.where(col <= lo, 0, np.where(col <= hi, 1, 2))
    cards = np.full(J, 3, dtype=np.int64)
    return CategoricalMatrix(codes=codes, cardinalities=cards)


@dataclass(frozen=True)
class Clustering:
    """A flat clustering: length-``n`` labels in ``[0, K)``, all present."""

    labels: np.ndarray
    K: int = field(default=0)

    def __post_init__(self) -> None:
        labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        if labels.ndim != 1 or labels.shape[0] < 1:
            raise DataError("labels must be a non-empty 1-D vector")
        k = int(self.K) if self.K else int(labels.max()) + 1
        present = np.unique(labels)
        if present[0] < 0 or present[-1] >= k or present.size != k:
            raise DataError("labels must use every index in [0, K) at least once")
        object.__setattr__(self, "labels", _freeze(labels))
        object.__setattr__(self, "K", k)

    @property
    def n(self) -> int:
        return self.labels.shape[0]


def relabel_dense(labels: Sequence[int] | np.ndarray) -> Clustering:
    """Clustering from arbitrary labels, renumbered by first appearance of
    the smallest member index (component containing row 0 gets label 0)."""
    arr = np.asarray(labels)
    _, dense = np.unique(arr, return_inverse=True)
    # np.unique orders by label value; reorder so that label order follows
    # the smallest original row index in each group
    order = {}
    for i, g in enumerate(dense):
        if g not in order:
            order[int(g)] = len(order)
    mapped = np.fromiter((order[int(g)] for g in dense), dtype=np.int64, count=arr.size)
    return Clustering(labels=mapped, K=len(order))
