"""File formats: CSV and aligned-FASTA ingestion, delimited exports,
Newick output and the flat key=value config format mirrored by the CLI."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import CategoricalMatrix, Clustering, DataError, DissimilarityMatrix, encode, relabel_dense
from .ensemble import IncidenceMatrix
from .hclust import Dendrogram, to_newick
from .subspace import SubspaceSet

FASTA_SUFFIXES = (".fa", ".fasta", ".fna", ".ffn", ".faa", ".afa", ".aln")
DEFAULT_GAP_SYMBOLS = ("-", ".")


def _column_index(column: str | int, names: list[str] | None, width: int) -> int:
    if isinstance(column, int) or (isinstance(column, str) and column.lstrip("-").isdigit()):
        idx = int(column)
        if idx < 0:
            idx += width
        if not 0 <= idx < width:
            raise DataError(f"column index {column} out of range for {width} columns")
        return idx
    if names is None:
        raise DataError(f"column {column!r} requires a header row")
    if column not in names:
        raise DataError(f"no column named {column!r} in header")
    return names.index(column)


def read_categorical_csv(
    path: str | Path,
    delimiter: str = ",",
    header: bool = False,
    gap_symbol: str | None = None,
    id_column: str | int | None = None,
    truth_column: str | int | None = None,
) -> tuple[CategoricalMatrix, Clustering | None]:
    """Load a delimited table of categorical values.

    Optional id and truth columns are pulled out before encoding; truth
    labels are renumbered densely in order of first appearance.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle, delimiter=delimiter) if row]
    if not rows:
        raise DataError(f"{path}: empty file")
    names = rows.pop(0) if header else None
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    drop: list[int] = []
    ids: list[str] | None = None
    truth_raw: list[str] | None = None
    if id_column is not None:
        idx = _column_index(id_column, names, width)
        ids = [row[idx] for row in rows]
        drop.append(idx)
    if truth_column is not None:
        idx = _column_index(truth_column, names, width)
        truth_raw = [row[idx] for row in rows]
        drop.append(idx)
    if drop:
        keep = [j for j in range(width) if j not in drop]
        rows = [[row[j] for j in keep] for row in rows]
    if ids is None:
        ids = [str(i) for i in range(len(rows))]
    x = encode(rows, gap_symbol=gap_symbol, row_ids=ids)
    truth = relabel_dense(np.unique(truth_raw, return_inverse=True)[1]) if truth_raw else None
    return x, truth


def write_categorical_csv(
    path: str | Path,
    x: CategoricalMatrix,
    truth: Clustering | None = None,
    delimiter: str = ",",
    header: bool = True,
) -> None:
    """Export a table in the same shape the ingestion accepts."""
    decoded = x.decode()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
        if header:
            names = [f"v{j}" for j in range(x.J)]
            if truth is not None:
                names.append("truth")
            writer.writerow(names)
        for i, row in enumerate(decoded):
            if truth is not None:
                row = row + [str(int(truth.labels[i]))]
            writer.writerow(row)


def read_fasta(path: str | Path) -> list[tuple[str, str]]:
    """(id, sequence) records; the id is the header token before whitespace."""
    records: list[tuple[str, str]] = []
    name: str | None = None
    chunks: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                if name is not None:
                    records.append((name, "".join(chunks)))
                name = line[1:].split()[0] if len(line) > 1 else ""
                chunks = []
            elif name is None:
                raise DataError(f"{path}: sequence data before the first FASTA header")
            else:
                chunks.append(line)
    if name is not None:
        records.append((name, "".join(chunks)))
    if not records:
        raise DataError(f"{path}: no FASTA records")
    return records


def write_fasta(path: str | Path, records: Sequence[tuple[str, str]], width: int = 60) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for name, seq in records:
            handle.write(f">{name}\n")
            for s in range(0, len(seq), width):
                handle.write(seq[s:s + width] + "\n")


def load_fasta_matrix(
    path: str | Path,
    gap_symbols: Sequence[str] = DEFAULT_GAP_SYMBOLS,
) -> CategoricalMatrix:
    """Encode pre-aligned FASTA records as a categorical table.

    All records must share one aligned length; every listed gap symbol is
    folded into the canonical ``-`` placeholder.
    """
    records = read_fasta(path)
    lengths = {len(seq) for _, seq in records}
    if len(lengths) != 1:
        raise DataError(f"{path}: aligned sequences must share one length, found {sorted(lengths)}")
    gaps = set(gap_symbols)
    rows = [["-" if ch in gaps else ch for ch in seq] for _, seq in records]
    ids = [name for name, _ in records]
    return encode(rows, gap_symbol="-", row_ids=ids)


def matrix_to_fasta_records(x: CategoricalMatrix) -> list[tuple[str, str]]:
    ids = x.row_ids or tuple(str(i) for i in range(x.n))
    return [(ids[i], "".join(row)) for i, row in enumerate(x.decode())]


def write_labels_csv(path: str | Path, ids: Sequence[str], labels: Sequence[int]) -> None:
    """Two-column (id, cluster) CSV, one row per input row in input order."""
    if len(ids) != len(labels):
        raise DataError("one id per label required")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "cluster"])
        for rid, lab in zip(ids, labels):
            writer.writerow([rid, int(lab)])


def write_dissimilarity_csv(path: str | Path, d: DissimilarityMatrix) -> None:
    """Square CSV of the dissimilarity values."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for row in d.values:
            writer.writerow([f"{v:.10g}" for v in row])


def write_incidence_csv(path: str | Path, w: IncidenceMatrix) -> None:
    """Integer CSV of the incidence matrix, one row per observation."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for row in w.entries:
            writer.writerow([int(v) for v in row])


def write_subspaces_jsonl(path: str | Path, s: SubspaceSet) -> None:
    """One JSON array of column indices per line, in subset order."""
    with open(path, "w", encoding="utf-8") as handle:
        for sub in s.subsets:
            handle.write(json.dumps([int(j) for j in sub]) + "\n")


def write_newick(path: str | Path, tree: Dendrogram, labels: tuple[str, ...] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(to_newick(tree, labels) + "\n")


def parse_config(text: str) -> dict[str, str]:
    """Flat ``key=value`` config format: one pair per line, ``#`` comments."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def format_config(values: dict[str, object]) -> str:
    lines = [f"{k}={v}" for k, v in values.items() if v is not None]
    return "\n".join(lines) + "\n"
